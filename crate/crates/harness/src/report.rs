//! CSV output: comma separated, `.` decimal point, header row, LF endings,
//! `inf` / `nan` literals for non-finite values.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};
use crate::experiment::{CellSummary, ComparisonRow, TrialRecord};

pub const TRIAL_HEADER: &str = "gamma,w,selection_mode,trial_index,ber,\
mean_selected_edit_distance,mean_unselected_edit_distance,psnr,ssim,\
gc_fraction,max_run,penalty,wall_time_ms";

pub const SUMMARY_HEADER: &str = "gamma,w,selection_mode,trials,mean_ber,\
mean_selected_edit_distance,mean_unselected_edit_distance,mean_psnr,mean_ssim";

pub const COMPARISON_HEADER: &str = "gamma,w,trials,mean_edit_distance_gap,\
sd_edit_distance_gap,mean_ber_gap,sd_ber_gap";

pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        x.to_string()
    }
}

/// Trial rows; `with_timing = false` drops the `wall_time_ms` column.
pub fn trials_csv(records: &[TrialRecord], with_timing: bool) -> String {
    let mut out = String::new();
    let header = if with_timing {
        TRIAL_HEADER
    } else {
        TRIAL_HEADER.trim_end_matches(",wall_time_ms")
    };
    out.push_str(header);
    out.push('\n');
    for r in records {
        let _ = write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            num(r.gamma),
            r.w,
            r.mode,
            r.trial,
            num(r.ber),
            num(r.mean_selected_edit_distance),
            num(r.mean_unselected_edit_distance),
            num(r.psnr),
            num(r.ssim),
            num(r.gc_fraction),
            r.max_run,
            num(r.penalty),
        );
        if with_timing {
            let _ = write!(out, ",{:.3}", r.wall_time_ms);
        }
        out.push('\n');
    }
    out
}

pub fn summary_csv(cells: &[CellSummary]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for c in cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            num(c.gamma),
            c.w,
            c.mode,
            c.trials,
            num(c.mean_ber),
            num(c.mean_selected_edit_distance),
            num(c.mean_unselected_edit_distance),
            num(c.mean_psnr),
            num(c.mean_ssim),
        );
    }
    out
}

pub fn comparison_csv(rows: &[ComparisonRow]) -> String {
    let mut out = format!("{COMPARISON_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            num(r.gamma),
            r.w,
            r.trials,
            num(r.mean_edit_distance_gap),
            num(r.sd_edit_distance_gap),
            num(r.mean_ber_gap),
            num(r.sd_ber_gap),
        );
    }
    out
}

/// `results.csv` -> `results.summary.csv`.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.csv")
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}
