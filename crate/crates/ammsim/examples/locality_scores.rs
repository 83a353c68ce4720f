//! Scores spatial locality of access streams and of the built-in kernels.
//!
//! The score is the stride-harmonic mean of a trace's consecutive-access
//! stride histogram: sum over strides of P(stride) / stride. Repeated
//! addresses carry no spatial information and stay out of the distribution.
//! A perfectly sequential stream scores 1.0; a stream of stride-8 jumps
//! scores 0.125; anything in between lands proportionally.
//!
//! Run with: cargo run --example locality_scores

use ammsim::kernels::default_specs;
use ammsim::locality::{spatial_locality, stride_histogram, StrideHistogram};

fn main() {
    // Hand-made histograms first: (stride, count) pairs.
    let sequential = StrideHistogram::from_counts(&[(1, 1000)]);
    let strided = StrideHistogram::from_counts(&[(8, 1000)]);
    let mixed = StrideHistogram::from_counts(&[(1, 500), (8, 500)]);
    println!("hand-built streams:");
    println!("  all stride 1      -> {}", spatial_locality(&sequential).unwrap());
    println!("  all stride 8      -> {}", spatial_locality(&strided).unwrap());
    println!("  half 1, half 8    -> {}", spatial_locality(&mixed).unwrap());

    // The four reference kernels at their standard sizes.
    println!();
    println!("reference kernels:");
    println!("  {:<14} {:>9} {:>10}  top strides (bytes x count)", "kernel", "accesses", "locality");
    for spec in default_specs() {
        let ddg = spec.generate().expect("kernel generates");
        let report = stride_histogram(&ddg);
        let score = spatial_locality(&report.merged).expect("kernels access memory");
        let top: Vec<String> = report
            .merged
            .top_buckets(3)
            .iter()
            .map(|(s, c)| format!("{s}x{c}"))
            .collect();
        println!(
            "  {:<14} {:>9} {:>10.6}  {}",
            spec.to_string(),
            report.merged.total(),
            score,
            top.join(", "),
        );
    }

    // Per-array breakdown for one kernel: which data structure is streamed
    // and which is scattered.
    let md = default_specs()[3].generate().expect("kernel generates");
    let report = stride_histogram(&md);
    println!();
    println!("md-knn per array:");
    for (name, hist) in &report.per_array {
        match spatial_locality(hist) {
            Ok(score) => println!("  {:<10} locality {:.6}", name, score),
            Err(_) => println!("  {:<10} fewer than two accesses", name),
        }
    }
}
