#![allow(dead_code)]

use std::path::{Path, PathBuf};

use forecast_core::simulate;

/// A smooth hump with small noise, 1975 onward; stays well above zero.
pub fn synthetic_rates(n: usize, seed: u64) -> Vec<f64> {
    let noise = simulate::normal(n, seed);
    (0..n)
        .map(|t| {
            let t = t as f64;
            50.0 + 1.2 * t - 0.04 * t * t + 0.4 * noise[t as usize]
        })
        .collect()
}

pub fn csv_text(start: i32, values: &[f64]) -> String {
    let mut out = String::from("year,rate\n");
    for (i, v) in values.iter().enumerate() {
        out.push_str(&format!("{},{}\n", start + i as i32, v));
    }
    out
}

pub fn write_csv(dir: &Path, name: &str, start: i32, values: &[f64]) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, csv_text(start, values)).unwrap();
    path
}

/// Every file in `dir`, sorted by name, with contents.
pub fn snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                std::fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}
