//! `k=v,k=v` family parameters.

use std::collections::BTreeMap;

use pinchflow::flow::FlowFamily;

pub struct Params(BTreeMap<String, f64>);

impl Params {
    pub fn parse(s: &str) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = pair.split_once('=').ok_or_else(|| format!("parameter `{pair}` is not of the form k=v"))?;
            let v: f64 = v.trim().parse().map_err(|_| format!("parameter `{k}` has non-numeric value `{v}`"))?;
            if map.insert(k.trim().to_string(), v).is_some() {
                return Err(format!("parameter `{k}` given twice"));
            }
        }
        Ok(Self(map))
    }

    fn take(&mut self, key: &str, default: Option<f64>) -> Result<f64, String> {
        self.0.remove(key).or(default).ok_or_else(|| format!("missing parameter `{key}`"))
    }

    fn take_count(&mut self, key: &str, default: Option<usize>) -> Result<usize, String> {
        let v = self.take(key, default.map(|d| d as f64))?;
        if v < 0.0 || v.fract() != 0.0 {
            return Err(format!("parameter `{key}` must be a nonnegative integer, got {v}"));
        }
        Ok(v as usize)
    }

    /// Builds the family; `m` defaults to 2, `K` (hyperbolic) to −1.
    pub fn family(mut self, kind: &str) -> Result<FlowFamily, String> {
        let fam = match kind {
            "sphere" | "cylinder" => {
                let n = self.take_count("n", Some(8))?;
                let m = self.take_count("m", Some(2))?;
                let r0 = self.take("r", None)?;
                if kind == "sphere" {
                    FlowFamily::Sphere { n, m, r0 }
                } else {
                    FlowFamily::Cylinder { n, m, r0 }
                }
            }
            "product" => FlowFamily::Product {
                p: self.take_count("p", None)?,
                q: self.take_count("q", None)?,
                m: self.take_count("m", Some(2))?,
                a0: self.take("a", None)?,
                b0: self.take("b", None)?,
            },
            "hyperbolic" => FlowFamily::Hyperbolic {
                n: self.take_count("n", Some(8))?,
                m: self.take_count("m", Some(2))?,
                r0: self.take("r", None)?,
                kbar: self.take("K", Some(-1.0))?,
            },
            other => return Err(format!("unknown family `{other}`")),
        };
        if let Some(k) = self.0.keys().next() {
            return Err(format!("unknown parameter `{k}` for family `{kind}`"));
        }
        fam.validate().map_err(|e| e.to_string())?;
        Ok(fam)
    }
}
