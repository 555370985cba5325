//! `krho-lp-solve MODEL.lp SOLUTION [--time-limit S]`
//!
//! Solves an LP/MILP file with HiGHS and writes `# status <s>`, `# objective <v>` and one
//! `<name> <value>` line per column. Exit code 0 for any definite status, 1 on load errors.

use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Parser;
use highs_sys::*;

#[derive(Parser)]
#[command(name = "krho-lp-solve", about = "Solve an LP file with HiGHS")]
struct Args {
    model: PathBuf,
    solution: PathBuf,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Keep HiGHS' own log on stderr.
    #[arg(long)]
    verbose: bool,
}

/// Owns a HiGHS instance.
struct Highs(*mut std::ffi::c_void);

impl Drop for Highs {
    fn drop(&mut self) {
        unsafe { Highs_destroy(self.0) }
    }
}

impl Highs {
    fn set_bool(&self, name: &str, v: bool) -> Result<()> {
        let c = CString::new(name)?;
        if unsafe { Highs_setBoolOptionValue(self.0, c.as_ptr(), v as HighsInt) } == kHighsStatusError {
            bail!("cannot set option {name}");
        }
        Ok(())
    }

    fn set_double(&self, name: &str, v: f64) -> Result<()> {
        let c = CString::new(name)?;
        if unsafe { Highs_setDoubleOptionValue(self.0, c.as_ptr(), v) } == kHighsStatusError {
            bail!("cannot set option {name}");
        }
        Ok(())
    }
}

fn status_name(s: HighsInt) -> &'static str {
    match s {
        x if x == kHighsModelStatusOptimal => "Optimal",
        x if x == kHighsModelStatusModelEmpty => "Optimal",
        x if x == kHighsModelStatusInfeasible => "Infeasible",
        x if x == kHighsModelStatusUnboundedOrInfeasible => "Infeasible",
        x if x == kHighsModelStatusUnbounded => "Unbounded",
        x if x == kHighsModelStatusTimeLimit => "TimeLimit",
        x if x == kHighsModelStatusIterationLimit => "IterationLimit",
        _ => "Unknown",
    }
}

fn main() -> Result<()> {
    let args = Args::parse();
    let path = CString::new(args.model.to_string_lossy().as_bytes())?;
    let highs = Highs(unsafe { Highs_create() });
    highs.set_bool("output_flag", args.verbose)?;
    highs.set_double("mip_rel_gap", 0.0)?;
    if let Some(t) = args.time_limit {
        highs.set_double("time_limit", t)?;
    }
    if unsafe { Highs_readModel(highs.0, path.as_ptr()) } == kHighsStatusError {
        bail!("HiGHS could not read {}", args.model.display());
    }
    if unsafe { Highs_run(highs.0) } == kHighsStatusError {
        bail!("HiGHS failed to solve {}", args.model.display());
    }
    let status = unsafe { Highs_getModelStatus(highs.0) };
    let name = status_name(status);

    let mut out = BufWriter::new(
        File::create(&args.solution).with_context(|| format!("creating {}", args.solution.display()))?,
    );
    writeln!(out, "# status {name}")?;
    if name == "Optimal" {
        let ncol = unsafe { Highs_getNumCol(highs.0) } as usize;
        let nrow = unsafe { Highs_getNumRow(highs.0) } as usize;
        let mut col = vec![0.0; ncol];
        let mut col_dual = vec![0.0; ncol];
        let mut row = vec![0.0; nrow];
        let mut row_dual = vec![0.0; nrow];
        unsafe {
            Highs_getSolution(
                highs.0,
                col.as_mut_ptr(),
                col_dual.as_mut_ptr(),
                row.as_mut_ptr(),
                row_dual.as_mut_ptr(),
            );
        }
        writeln!(out, "# objective {}", unsafe { Highs_getObjectiveValue(highs.0) })?;
        let mut buf = vec![0 as c_char; kHighsMaximumStringLength as usize + 1];
        for (j, v) in col.iter().enumerate() {
            if unsafe { Highs_getColName(highs.0, j as HighsInt, buf.as_mut_ptr()) } == kHighsStatusError {
                bail!("column {j} has no name");
            }
            let cname = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy();
            writeln!(out, "{cname} {v}")?;
        }
    }
    out.flush()?;
    Ok(())
}
