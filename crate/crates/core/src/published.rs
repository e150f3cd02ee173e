//! Published benchmark results for the twelve trainers on the ECG task.
//!
//! Rows alternate base method / boosted variant; columns follow
//! [`Metric::ALL`](crate::evaluation::Metric::ALL). Values are percentages.

/// Trainer names in row order.
pub const ALGORITHMS: [&str; 12] = [
    "RP",
    "CODEL-RP",
    "OSS",
    "CODEL-OSS",
    "GDM",
    "CODEL-GDM",
    "GDA",
    "CODEL-GDA",
    "GD",
    "CODEL-GD",
    "CG-PR",
    "CODEL-CG-PR",
];

/// Mean 10-fold CV metric values.
pub const MEANS: [[f64; 6]; 12] = [
    [70.46, 83.42, 50.68, 72.09, 77.32, 64.97],
    [71.13, 83.89, 51.68, 72.61, 77.83, 65.80],
    [70.88, 83.77, 51.21, 72.42, 77.66, 65.41],
    [75.36, 81.03, 66.70, 79.40, 79.98, 72.99],
    [68.21, 83.50, 44.89, 70.18, 76.05, 60.46],
    [72.11, 87.91, 48.03, 72.53, 79.25, 64.17],
    [69.33, 83.89, 47.11, 76.10, 76.99, 47.51],
    [71.23, 84.35, 51.22, 72.95, 78.02, 64.97],
    [69.43, 83.31, 48.26, 71.09, 76.70, 63.35],
    [71.06, 84.20, 51.03, 72.41, 77.84, 65.50],
    [79.02, 84.43, 70.78, 81.59, 82.94, 77.23],
    [79.21, 79.79, 78.32, 84.99, 82.28, 79.00],
];

/// Rank columns as printed alongside the means.
///
/// The G-mean column gives the 64.97 tie rank 7 to both rows instead of the
/// averaged 7.5.
pub const RANKS: [[f64; 6]; 12] = [
    [9.0, 9.0, 8.0, 10.0, 9.0, 7.0],
    [6.0, 5.5, 4.0, 6.0, 7.0, 4.0],
    [8.0, 7.0, 6.0, 8.0, 8.0, 6.0],
    [3.0, 11.0, 3.0, 3.0, 3.0, 3.0],
    [12.0, 8.0, 12.0, 12.0, 12.0, 11.0],
    [4.0, 1.0, 10.0, 7.0, 4.0, 9.0],
    [11.0, 5.5, 11.0, 4.0, 10.0, 12.0],
    [5.0, 3.0, 5.0, 5.0, 5.0, 7.0],
    [10.0, 10.0, 9.0, 11.0, 11.0, 10.0],
    [7.0, 4.0, 7.0, 9.0, 6.0, 5.0],
    [2.0, 2.0, 2.0, 2.0, 1.0, 2.0],
    [1.0, 12.0, 1.0, 1.0, 2.0, 1.0],
];

/// Printed win/tie/loss totals per metric.
pub const WTL: [(usize, usize, usize); 6] = [(6, 0, 0), (4, 0, 2), (6, 0, 0), (5, 0, 1), (5, 0, 1), (6, 0, 0)];

/// Printed error enhancement of each boosted variant over its base, per metric.
pub const ERROR_ENHANCEMENT: [[f64; 6]; 6] = [
    [2.27, 2.83, 2.03, 1.86, 2.25, 2.37],
    [15.41, -16.86, 31.77, 25.32, 10.38, 21.93],
    [12.24, 26.73, 5.69, 7.86, 13.38, 9.38],
    [6.20, 2.86, 7.77, -13.18, 4.48, 33.25],
    [5.33, 5.33, 5.34, 4.56, 4.89, 5.87],
    [0.90, -29.81, 25.85, 18.45, -3.87, 7.78],
];

/// Printed mean ranks of the boosted variants across the six metrics.
pub const MEAN_RANKS: [(&str, f64); 6] = [
    ("CODEL-CG-PR", 3.0),
    ("CODEL-OSS", 4.3),
    ("CODEL-GDA", 5.0),
    ("CODEL-RP", 5.4),
    ("CODEL-GDM", 5.8),
    ("CODEL-GD", 6.3),
];
