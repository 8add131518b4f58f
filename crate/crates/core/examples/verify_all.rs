//! Re-derives and verifies the embedded tables: `cargo run --release --example verify_all [N,d ...]`.

use std::time::Instant;

use qpin_core::lp::verify_catalog;
use qpin_core::Setting;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let settings: Vec<Setting> = if args.is_empty() {
        Setting::KNOWN.to_vec()
    } else {
        args.iter().map(|a| a.parse().expect("setting `N,d`")).collect()
    };
    for s in settings {
        let start = Instant::now();
        let report = verify_catalog(s).expect("derivation");
        for r in report.mismatches() {
            println!("{s} row {} table {:?} derived {:?}", r.index, r.table, r.derived);
        }
        println!("{s}: {}/{} verified in {:.1?}", report.matched(), report.rows.len(), start.elapsed());
    }
}
