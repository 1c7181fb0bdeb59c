//! Output files: CSV text, gnuplot scripts and the JSON-lines view.

use std::io::Write;
use std::path::{Path, PathBuf};

use super::config::{ExperimentConfig, ExperimentId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

impl OutputFile {
    pub fn new(name: &str, contents: String) -> Self {
        Self {
            name: name.to_string(),
            contents,
        }
    }

    pub(crate) fn text(name: &str, bytes: Vec<u8>) -> Self {
        Self::new(name, String::from_utf8(bytes).expect("writers emit UTF-8"))
    }
}

pub fn write_files(dir: &Path, files: &[OutputFile]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    files
        .iter()
        .map(|f| {
            let path = dir.join(&f.name);
            std::fs::write(&path, &f.contents)
                .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            Ok(path)
        })
        .collect()
}

/// The effective configuration as `# config: key = value` lines.
pub fn config_comment<W: Write>(mut w: W, cfg: &ExperimentConfig) -> Result<()> {
    for line in cfg.to_text().lines() {
        writeln!(w, "# config: {line}")?;
    }
    Ok(())
}

const PREAMBLE: &str =
    "set datafile separator ','\nset datafile commentschars '#'\nset key autotitle columnhead\n";

/// Fig. 2 panels: `eta1`, `eta2` against N, or `|s|` against d.
pub fn fig2_script(id: ExperimentId, csv: &str) -> String {
    let mut s =
        format!("# gnuplot script for {id}; frequencies in multiples of pi krad/s\n{PREAMBLE}");
    s.push_str("set terminal pngcairo size 900,400\n");
    s.push_str(&format!("set output '{id}.png'\n"));
    if id == ExperimentId::Fig2a {
        // Columns: 1 N, 14 eta1, 15 eta2.
        s.push_str("set multiplot layout 1,2\n");
        s.push_str(&format!("set xlabel 'N'\nset ylabel 'eta1 / pi'\nplot '{csv}' using 1:14 with linespoints title 'eta1'\n"));
        s.push_str(&format!(
            "set ylabel 'eta2 / pi'\nplot '{csv}' using 1:15 with linespoints title 'eta2'\n"
        ));
        s.push_str("unset multiplot\n");
    } else {
        // Columns: 1 d, 13 s.
        s.push_str(&format!(
            "set xlabel 'd / pi'\nset ylabel '|s| / pi'\nplot '{csv}' using 1:(abs($13)) with lines title '|s|'\n"
        ));
    }
    s
}

/// One panel per observable, one curve per run; alternating dash styles
/// distinguish the runs.
pub fn dynamics_script(
    id: ExperimentId,
    runs: &[(String, String)],
    observables: &[String],
) -> String {
    let mut s = format!("# gnuplot script for {id}; time in ms\n{PREAMBLE}");
    s.push_str(&format!(
        "set terminal pngcairo size 900,{}\n",
        300 * observables.len().max(1)
    ));
    s.push_str(&format!("set output '{id}.png'\n"));
    s.push_str(&format!(
        "set multiplot layout {},1\nset xlabel 't (ms)'\n",
        observables.len().max(1)
    ));
    for (k, obs) in observables.iter().enumerate() {
        s.push_str(&format!("set ylabel '{obs}'\nplot "));
        let curves: Vec<String> = runs
            .iter()
            .enumerate()
            .map(|(i, (file, label))| {
                let dash = if i % 2 == 0 { 2 } else { 1 };
                format!(
                    "'{file}' using 1:{} with lines dt {dash} title '{label}'",
                    k + 2
                )
            })
            .collect();
        s.push_str(&curves.join(", \\\n     "));
        s.push('\n');
    }
    s.push_str("unset multiplot\n");
    s
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

/// Re-encodes a CSV with `#` header lines as JSON lines: one `meta` object
/// holding the header lines, then one object per row. Numbers are copied
/// verbatim, so the numeric content is identical to the CSV.
pub fn csv_to_jsonlines(csv: &str) -> String {
    let mut meta = Vec::new();
    let mut header: Option<Vec<String>> = None;
    let mut out = String::new();
    let mut rows = Vec::new();
    for line in csv.lines() {
        if let Some(c) = line.strip_prefix('#') {
            meta.push(json_string(c.trim()));
        } else if let Some(cols) = &header {
            if line.is_empty() {
                continue;
            }
            let mut fields = Vec::new();
            let mut rest = line;
            for (i, name) in cols.iter().enumerate() {
                // The trailing field may be a quoted message containing no commas.
                let (v, tail) = if i + 1 == cols.len() {
                    (rest, "")
                } else {
                    rest.split_once(',').unwrap_or((rest, ""))
                };
                rest = tail;
                let value = if v.is_empty() {
                    "null".to_string()
                } else if v.parse::<f64>().is_ok_and(f64::is_finite) {
                    v.to_string()
                } else {
                    json_string(v.trim_matches('"'))
                };
                fields.push(format!("{}:{value}", json_string(name)));
            }
            rows.push(format!("{{{}}}", fields.join(",")));
        } else {
            header = Some(line.split(',').map(str::to_string).collect());
        }
    }
    out.push_str(&format!("{{\"meta\":[{}]}}\n", meta.join(",")));
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    out
}
