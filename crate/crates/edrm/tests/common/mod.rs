#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use image::RgbImage;

pub fn write_rgb(path: &Path, width: u32, height: u32, bytes: Vec<u8>) {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).unwrap();
    }
    RgbImage::from_raw(width, height, bytes)
        .unwrap()
        .save(path)
        .unwrap();
}

pub fn write_solid(path: &Path, width: u32, height: u32, rgb: [u8; 3]) {
    let bytes = rgb
        .iter()
        .copied()
        .cycle()
        .take((width * height * 3) as usize)
        .collect();
    write_rgb(path, width, height, bytes);
}

/// `count` images named `img_000.png`, ... whose bytes sit in
/// `base..base + 16` with a per-image texture, so classes have full rank.
pub fn write_class(dir: &Path, count: usize, width: u32, height: u32, base: u8) -> Vec<PathBuf> {
    (0..count)
        .map(|i| {
            let path = dir.join(format!("img_{i:03}.png"));
            let bytes = (0..(width * height * 3) as usize)
                .map(|k| base.wrapping_add(((i * 7 + k * k * 3 + i * k) % 16) as u8))
                .collect();
            write_rgb(&path, width, height, bytes);
            path
        })
        .collect()
}

pub fn edrm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edrm"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("run edrm")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}
