//! Experiments over graph families: spatial-mixing scans, zero scans, root checks.

mod ssm;
mod zeros;

pub use ssm::{
    fit_decay, mean_gap_by_distance, ratio_bound_scan, ssm_scan, DecayFit, RatioBoundReport,
    SectorCertification, SsmRecord, SsmScan, SsmScanConfig,
};
pub use zeros::{
    clawfree_root_check, polynomial_roots, root_report, zero_count_in_disk, zero_scan,
    zero_scan_poly, Rectangle, RootReport, ZeroScanReport,
};
