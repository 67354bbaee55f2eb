use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use dicke_core::io::{self, Header};
use dicke_core::phase_space::{DiscRaster, HusimiGrid};
use dicke_core::quantum::states::StateVector;

use crate::config::RunConfig;
use crate::error::CliResult;

/// Output directory plus the provenance header shared by its files.
pub struct Output {
    dir: PathBuf,
    header: Header,
}

impl Output {
    /// Call after every setting has been read so the header is complete.
    pub fn new(cfg: &RunConfig, derived: &[(&str, String)]) -> CliResult<Self> {
        let dir = PathBuf::from(cfg.string_or("out", "."));
        fs::create_dir_all(&dir)?;
        let mut header: Header = vec![
            ("program".into(), format!("dicke {}", env!("CARGO_PKG_VERSION"))),
            ("command".into(), cfg.command().to_string()),
        ];
        header.extend(cfg.provenance());
        header.extend(derived.iter().map(|(k, v)| (k.to_string(), v.clone())));
        Ok(Self { dir, header })
    }

    fn create(&self, name: &str) -> CliResult<BufWriter<File>> {
        Ok(BufWriter::new(File::create(self.dir.join(name))?))
    }

    fn header_with(&self, extra: &[(&str, String)]) -> Header {
        let mut h = self.header.clone();
        h.extend(extra.iter().map(|(k, v)| (k.to_string(), v.clone())));
        h
    }

    pub fn csv(&self, name: &str, extra: &[(&str, String)], columns: &[&str], rows: &[Vec<f64>]) -> CliResult<()> {
        let mut w = self.create(name)?;
        io::write_csv(&mut w, &self.header_with(extra), columns, rows)?;
        w.flush()?;
        Ok(())
    }

    /// `<stem>.csv` and `<stem>.raster`, plus `<stem>_disc.raster` when `disc > 0`.
    pub fn husimi(&self, stem: &str, extra: &[(&str, String)], g: &HusimiGrid, disc: usize) -> CliResult<()> {
        let h = self.header_with(extra);
        let mut w = self.create(&format!("{stem}.csv"))?;
        io::write_husimi_csv(&mut w, &h, g)?;
        w.flush()?;
        let mut w = self.create(&format!("{stem}.raster"))?;
        io::write_husimi_raster(&mut w, &h, g)?;
        w.flush()?;
        if disc > 0 {
            let d: DiscRaster = dicke_core::phase_space::husimi_disc_projection(g, disc);
            let mut w = self.create(&format!("{stem}_disc.raster"))?;
            io::write_disc_raster(&mut w, &h, &d)?;
            w.flush()?;
        }
        Ok(())
    }

    pub fn state(&self, name: &str, psi: &StateVector) -> CliResult<()> {
        let mut w = self.create(name)?;
        io::write_state(&mut w, psi)?;
        w.flush()?;
        Ok(())
    }
}
