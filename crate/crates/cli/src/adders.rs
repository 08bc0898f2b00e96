use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use approxvit::AdderModel;

/// Adders named on the command line plus the netlist files they came from.
pub struct Resolved {
    pub models: Vec<AdderModel>,
    pub files: Vec<PathBuf>,
}

/// Each spec is a built-in (`exact:12`, `lower-or:12:6`, `truncated:16:4`),
/// a `.net` file, or a directory whose `*.net` files are loaded in name
/// order. A model is named after its file stem.
pub fn resolve(specs: &[String]) -> Result<Resolved> {
    let mut out = Resolved {
        models: Vec::new(),
        files: Vec::new(),
    };
    for spec in specs
        .iter()
        .flat_map(|s| s.split(','))
        .map(str::trim)
        .filter(|s| !s.is_empty())
    {
        let path = Path::new(spec);
        if path.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(path)
                .with_context(|| format!("listing {}", path.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "net"))
                .collect();
            files.sort();
            if files.is_empty() {
                bail!("no .net files in {}", path.display());
            }
            for f in files {
                out.models.push(load(&f)?);
                out.files.push(f);
            }
        } else if path.is_file() {
            out.models.push(load(path)?);
            out.files.push(path.to_path_buf());
        } else {
            out.models
                .push(AdderModel::from_spec(spec).with_context(|| format!("adder {spec:?}"))?);
        }
    }
    if out.models.is_empty() {
        bail!("no adders given");
    }
    let mut names: Vec<&str> = out.models.iter().map(|m| m.name()).collect();
    names.sort_unstable();
    if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
        bail!("adder name {:?} given twice", w[0]);
    }
    Ok(out)
}

fn load(path: &Path) -> Result<AdderModel> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let name = path.file_stem().unwrap_or_default().to_string_lossy();
    AdderModel::load_netlist(name, &text).with_context(|| format!("netlist {}", path.display()))
}
