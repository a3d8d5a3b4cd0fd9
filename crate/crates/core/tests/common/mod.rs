#![allow(dead_code)]

use std::path::PathBuf;

use silsamp_core::{load_codebook, load_human_responses, Codebook, HumanDataset};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn bundled_codebook() -> Codebook {
    load_codebook(data_dir().join("codebook.toml")).expect("bundled codebook")
}

pub fn bundled_2020(codebook: &Codebook) -> HumanDataset {
    load_human_responses(data_dir().join("anes2020_synthetic.csv"), codebook, "2020").expect("bundled data")
}

pub fn oracle_json(name: &str) -> serde_json::Value {
    let text = std::fs::read_to_string(data_dir().join("oracle").join(name)).expect("oracle file");
    serde_json::from_str(&text).expect("oracle json")
}

pub fn f64_vec(v: &serde_json::Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

/// Small deterministic generator for test-side sampling (SplitMix64).
pub struct SplitMix(pub u64);

impl SplitMix {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// 1-based categorical draw.
    pub fn categorical(&mut self, probs: &[f64]) -> usize {
        let u = self.uniform();
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return i + 1;
            }
        }
        probs.len()
    }
}
