use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// Writes through a temporary file in the target directory, then renames over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// `dir/name.csv` with `suffix` → `dir/name{suffix}`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn file_name(path: &Path) -> String {
    path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn histogram_script(csv: &Path, title: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set title '{title}'\n\
         set xlabel 'gap'\n\
         set ylabel 'density'\n\
         set style fill solid 0.5\n\
         plot '{}' skip 1 using (($1+$2)/2):4:($2-$1) with boxes title 'empirical'\n",
        file_name(csv)
    )
}

pub fn pdf_script(csv: &Path) -> String {
    format!(
        "set datafile separator ','\n\
         set title 'limiting gap density'\n\
         set xlabel 't'\n\
         set ylabel 'f(t)'\n\
         plot '{}' skip 1 using 1:2 with lines title 'f'\n",
        file_name(csv)
    )
}

pub fn gaps_script(csv: &Path) -> String {
    format!(
        "set datafile separator ','\n\
         set title 'renormalized gaps'\n\
         set xlabel 'index'\n\
         set ylabel 'gap'\n\
         plot '{}' skip 1 using 1:3 with dots title 'gap'\n",
        file_name(csv)
    )
}
