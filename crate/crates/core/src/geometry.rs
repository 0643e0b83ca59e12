//! Point-process sampling on a disc window: the SBS ground process with its
//! UL/DL marks, and the marked file process.

use std::f64::consts::PI;
use std::io::Write;
use std::ops::{Add, Sub};

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use crate::caching::CatalogModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn polar(radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            x: radius * c,
            y: radius * s,
        }
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }
}

impl Add for Point2D {
    type Output = Point2D;
    fn add(self, o: Point2D) -> Point2D {
        Point2D::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2D {
    type Output = Point2D;
    fn sub(self, o: Point2D) -> Point2D {
        Point2D::new(self.x - o.x, self.y - o.y)
    }
}

pub fn distance(a: Point2D, b: Point2D) -> f64 {
    (a - b).norm()
}

pub(crate) fn distance_sq(a: Point2D, b: Point2D) -> f64 {
    (a - b).norm_sq()
}

/// One realization of the marked SBS process. Entry `i` of every list belongs
/// to the same SBS.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MarkedNetwork {
    pub sbs: Vec<Point2D>,
    pub ul: Vec<Point2D>,
    pub dl: Vec<Point2D>,
    pub cache_miss: Vec<bool>,
    pub window_radius: f64,
}

impl MarkedNetwork {
    pub fn len(&self) -> usize {
        self.sbs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sbs.is_empty()
    }
}

/// Points of the file process with their catalog index (1-based).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FileProcess {
    pub points: Vec<Point2D>,
    pub file_index: Vec<usize>,
}

pub(crate) fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    // Poisson::new only fails for non-positive or non-finite means.
    Poisson::new(mean)
        .expect("finite positive mean")
        .sample(rng) as usize
}

pub(crate) fn uniform_in_disc<R: Rng + ?Sized>(
    center: Point2D,
    radius: f64,
    rng: &mut R,
) -> Point2D {
    let r = radius * rng.random::<f64>().sqrt();
    let a = 2.0 * PI * rng.random::<f64>();
    center + Point2D::polar(r, a)
}

/// Homogeneous PPP of the given density on the disc of `window_radius` around the origin.
pub fn sample_ppp<R: Rng + ?Sized>(
    density: f64,
    window_radius: f64,
    rng: &mut R,
) -> Result<Vec<Point2D>> {
    sample_ppp_in(density, Point2D::ORIGIN, window_radius, rng)
}

pub fn sample_ppp_in<R: Rng + ?Sized>(
    density: f64,
    center: Point2D,
    window_radius: f64,
    rng: &mut R,
) -> Result<Vec<Point2D>> {
    if !(density >= 0.0) || !density.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "density must be >= 0, got {density}"
        )));
    }
    if !(window_radius > 0.0) || !window_radius.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "window radius must be > 0, got {window_radius}"
        )));
    }
    let n = poisson_count(density * PI * window_radius * window_radius, rng);
    Ok((0..n)
        .map(|_| uniform_in_disc(center, window_radius, rng))
        .collect())
}

/// Gives each SBS a UL node at distance `r_ul` and a DL node at distance
/// `r_dl`, at independent uniform angles. All SBSs start in the cache-miss state.
pub fn attach_marks<R: Rng + ?Sized>(
    sbs: Vec<Point2D>,
    r_ul: f64,
    r_dl: f64,
    window_radius: f64,
    rng: &mut R,
) -> Result<MarkedNetwork> {
    if !(r_ul > 0.0 && r_dl > 0.0) {
        return Err(Error::InvalidArgument("mark distances must be > 0".into()));
    }
    let mut ul = Vec::with_capacity(sbs.len());
    let mut dl = Vec::with_capacity(sbs.len());
    for &x in &sbs {
        ul.push(x + Point2D::polar(r_ul, 2.0 * PI * rng.random::<f64>()));
        dl.push(x + Point2D::polar(r_dl, 2.0 * PI * rng.random::<f64>()));
    }
    let n = sbs.len();
    Ok(MarkedNetwork {
        sbs,
        ul,
        dl,
        cache_miss: vec![true; n],
        window_radius,
    })
}

/// File process on the disc around the origin.
pub fn sample_file_process<R: Rng + ?Sized>(
    catalog: &CatalogModel,
    window_radius: f64,
    rng: &mut R,
) -> Result<FileProcess> {
    sample_file_process_in(catalog, Point2D::ORIGIN, window_radius, rng)
}

/// Density-eta PPP on the disc with i.i.d. marks drawn from the request
/// probabilities; equivalent to superposing the per-file thinned processes.
pub fn sample_file_process_in<R: Rng + ?Sized>(
    catalog: &CatalogModel,
    center: Point2D,
    window_radius: f64,
    rng: &mut R,
) -> Result<FileProcess> {
    let points = sample_ppp_in(catalog.eta_files, center, window_radius, rng)?;
    let file_index = points.iter().map(|_| catalog.sample_index(rng)).collect();
    Ok(FileProcess { points, file_index })
}

/// Writes one realization as CSV rows `kind,index,x,y,mark`. The mark column
/// holds the cache-miss flag for SBSs and the catalog index for files.
pub fn write_snapshot_csv<W: Write>(
    net: &MarkedNetwork,
    files: Option<&FileProcess>,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "index", "x", "y", "mark"])?;
    for i in 0..net.len() {
        let miss = if net.cache_miss[i] { "1" } else { "0" };
        let idx = i.to_string();
        for (kind, p, mark) in [
            ("sbs", net.sbs[i], miss),
            ("ul", net.ul[i], ""),
            ("dl", net.dl[i], ""),
        ] {
            w.write_record([kind, &idx, &p.x.to_string(), &p.y.to_string(), mark])?;
        }
    }
    if let Some(f) = files {
        for (i, (p, m)) in f.points.iter().zip(&f.file_index).enumerate() {
            w.write_record([
                "file",
                &i.to_string(),
                &p.x.to_string(),
                &p.y.to_string(),
                &m.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn distance_basics() {
        let a = Point2D::new(0.0, 0.0);
        let b = Point2D::new(3.0, 4.0);
        assert_eq!(distance(a, a), 0.0);
        assert_eq!(distance(a, b), 5.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let p = Point2D::new(
                rng.random::<f64>() * 100.0 - 50.0,
                rng.random::<f64>() * 7.0,
            );
            let q = Point2D::new(rng.random::<f64>() * -3.0, rng.random::<f64>() * 1e3);
            assert_eq!(distance(p, q), distance(q, p));
        }
    }

    #[test]
    fn zero_density_is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_ppp(0.0, 300.0, &mut rng).unwrap().is_empty());
        assert!(sample_ppp(-1.0, 300.0, &mut rng).is_err());
        assert!(sample_ppp(1.0, 0.0, &mut rng).is_err());
    }

    #[test]
    fn points_inside_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pts = sample_ppp(5e-3, 120.0, &mut rng).unwrap();
        assert!(!pts.is_empty());
        assert!(pts.iter().all(|p| p.norm() <= 120.0));
    }

    #[test]
    fn marks_respect_fixed_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let empty = attach_marks(Vec::new(), 20.0, 5.0, 300.0, &mut rng).unwrap();
        assert!(empty.is_empty() && empty.ul.is_empty() && empty.dl.is_empty());

        let sbs = sample_ppp(1e-3, 300.0, &mut rng).unwrap();
        let net = attach_marks(sbs, 20.0, 5.0, 300.0, &mut rng).unwrap();
        assert_eq!(net.ul.len(), net.len());
        assert_eq!(net.dl.len(), net.len());
        assert_eq!(net.cache_miss.len(), net.len());
        for i in 0..net.len() {
            assert!((distance(net.ul[i], net.sbs[i]) - 20.0).abs() < 1e-9);
            assert!((distance(net.sbs[i], net.dl[i]) - 5.0).abs() < 1e-9);
        }
    }

    #[test]
    fn same_seed_same_points() {
        let a = sample_ppp(1e-3, 300.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_ppp(1e-3, 300.0, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn snapshot_csv_layout() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let net = attach_marks(vec![Point2D::new(1.0, 2.0)], 20.0, 5.0, 50.0, &mut rng).unwrap();
        let files = FileProcess {
            points: vec![Point2D::new(0.5, -0.5)],
            file_index: vec![3],
        };
        let mut buf = Vec::new();
        write_snapshot_csv(&net, Some(&files), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "kind,index,x,y,mark");
        assert_eq!(lines[1], "sbs,0,1,2,1");
        assert!(lines[2].starts_with("ul,0,"));
        assert!(lines[3].starts_with("dl,0,"));
        assert_eq!(lines[4], "file,0,0.5,-0.5,3");
    }
}
