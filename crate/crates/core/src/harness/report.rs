//! Result artifacts: a results table, per-epoch curves and a JSON sidecar.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::experiment::{ExperimentResult, MeanValue};
use crate::error::Result;

pub const RESULTS_HEADER: &str = "pair,model,val_acc,test_acc,sensitivity,specificity,precision,auc";
pub const CURVES_HEADER: &str = "fold,epoch,train_loss,val_loss,val_accuracy";

fn percent(v: &MeanValue) -> String {
    v.mean.map_or_else(|| "NA".into(), |m| format!("{:.2}", 100.0 * m))
}

/// One row per experiment. Accuracies and rates are percentages with two
/// decimals, AUC a fraction with four; undefined means are written `NA`.
pub fn results_csv(results: &[ExperimentResult]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in results {
        let a = &r.aggregate;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.dataset,
            r.model_variant,
            percent(&a.val_accuracy),
            percent(&a.test_accuracy),
            percent(&a.sensitivity),
            percent(&a.specificity),
            percent(&a.precision),
            a.auc.mean.map_or_else(|| "NA".into(), |m| format!("{m:.4}")),
        );
    }
    out
}

pub fn curves_csv(result: &ExperimentResult) -> String {
    let mut out = String::from(CURVES_HEADER);
    out.push('\n');
    for fold in &result.folds {
        for e in &fold.curves {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fold.fold, e.epoch, e.train_loss, e.val_loss, e.val_accuracy
            );
        }
    }
    out
}

pub fn write_results_csv(path: &Path, results: &[ExperimentResult]) -> Result<()> {
    fs::write(path, results_csv(results))?;
    Ok(())
}

pub fn write_curves_csv(path: &Path, result: &ExperimentResult) -> Result<()> {
    fs::write(path, curves_csv(result))?;
    Ok(())
}

pub fn write_results_json(path: &Path, results: &[ExperimentResult]) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(results)?)?;
    Ok(())
}
