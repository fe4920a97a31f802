//! Content-addressed store of mobility curves. Entries are never
//! invalidated implicitly; `cache clear` removes them.

use std::fs;
use std::path::{Path, PathBuf};

use shapeshift::aggregation::MobilityCurve;
use shapeshift::geometry::ApproachCase;

use crate::error::CliError;

pub const CACHE_ENV: &str = "SHAPESHIFT_CACHE_DIR";

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    /// `$SHAPESHIFT_CACHE_DIR`, else `$XDG_CACHE_HOME/shapeshift`, else
    /// `$HOME/.cache/shapeshift`, else `.shapeshift-cache`.
    pub fn from_env() -> Self {
        let var = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
        let dir = var(CACHE_ENV)
            .or_else(|| var("XDG_CACHE_HOME").map(|p| p.join("shapeshift")))
            .or_else(|| var("HOME").map(|p| p.join(".cache").join("shapeshift")))
            .unwrap_or_else(|| PathBuf::from(".shapeshift-cache"));
        Cache { dir }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, case: ApproachCase, key: &str) -> PathBuf {
        self.dir.join(format!("mobility-{}-{key}.csv", case.as_str()))
    }

    pub fn load(&self, case: ApproachCase, key: &str) -> Result<Option<MobilityCurve>, CliError> {
        let path = self.path(case, key);
        match fs::File::open(&path) {
            Ok(f) => Ok(Some(MobilityCurve::read_csv(case, f).map_err(|e| {
                CliError::Io(std::io::Error::other(format!("corrupt cache entry {}: {e}", path.display())))
            })?)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(e.into()),
        }
    }

    /// Written to a temporary name first so readers never see a partial file.
    pub fn store(&self, key: &str, curve: &MobilityCurve) -> Result<PathBuf, CliError> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(curve.case, key);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        {
            let f = fs::File::create(&tmp)?;
            curve.write_csv(std::io::BufWriter::new(f))?;
        }
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Entry names and sizes in bytes, sorted by name.
    pub fn list(&self) -> Result<Vec<(String, u64)>, CliError> {
        let mut out = Vec::new();
        let entries = match fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(out),
            Err(e) => return Err(e.into()),
        };
        for entry in entries {
            let entry = entry?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if is_entry(&name) {
                out.push((name, entry.metadata()?.len()));
            }
        }
        out.sort();
        Ok(out)
    }

    /// Removes all entries; returns how many.
    pub fn clear(&self) -> Result<usize, CliError> {
        let entries = self.list()?;
        for (name, _) in &entries {
            fs::remove_file(self.dir.join(name))?;
        }
        Ok(entries.len())
    }
}

fn is_entry(name: &str) -> bool {
    name.starts_with("mobility-") && name.ends_with(".csv")
}

#[cfg(test)]
mod tests {
    use super::*;
    use shapeshift::aggregation::MobilitySample;

    #[test]
    fn store_load_list_clear() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache { dir: dir.path().join("c") };
        assert!(cache.list().unwrap().is_empty());
        let samples = vec![
            MobilitySample { delta: 1.1, h_loc: 0.1, h_fluid: 30.0 },
            MobilitySample { delta: 3.0, h_loc: 0.5, h_fluid: 20.0 },
        ];
        let curve = MobilityCurve::new(ApproachCase::Wall, samples.clone()).unwrap();
        assert!(cache.load(ApproachCase::Wall, "abc").unwrap().is_none());
        cache.store("abc", &curve).unwrap();
        let back = cache.load(ApproachCase::Wall, "abc").unwrap().unwrap();
        assert_eq!(back.samples(), &samples[..]);
        assert!(cache.load(ApproachCase::TwoSpheres, "abc").unwrap().is_none());
        fs::write(cache.dir().join("unrelated.txt"), "x").unwrap();
        assert_eq!(cache.list().unwrap().len(), 1);
        assert_eq!(cache.clear().unwrap(), 1);
        assert!(cache.dir().join("unrelated.txt").exists());
    }
}
