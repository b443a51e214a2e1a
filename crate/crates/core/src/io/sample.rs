//! Verbose dump of a single RDS sample.

use std::fmt::Write as _;

use crate::io::format::exact;
use crate::rds::RdsSample;

pub fn format_sample(sample: &RdsSample) -> String {
    let mut out = String::from(
        "order,node,quantity,reported_degree,true_degree,wave,recruiter,restart_index\n",
    );
    for (k, r) in sample.records.iter().enumerate() {
        let recruiter = r.recruiter.map(|x| x.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{k},{},{},{},{},{},{recruiter},{}",
            r.node,
            exact(r.quantity),
            r.reported_degree,
            r.true_degree,
            r.wave,
            r.restart_index
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rds::RdsRecord;

    #[test]
    fn seed_has_empty_recruiter() {
        let rec = |node, recruiter, wave| RdsRecord {
            node,
            quantity: 170.5,
            reported_degree: 2,
            true_degree: 3,
            wave,
            recruiter,
            restart_index: 0,
        };
        let sample = RdsSample {
            records: vec![rec(4, None, 0), rec(7, Some(4), 1)],
            restarts: 0,
            waves_max: 1,
        };
        let text = format_sample(&sample);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "0,4,1.7050000000000000e2,2,3,0,,0");
        assert_eq!(lines[2], "1,7,1.7050000000000000e2,2,3,1,4,0");
    }
}
