use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{GridDims, GridSpec};
use crate::propagator::state::{Domain, FieldState};

const MAGIC: &str = "TWINBEAM-FIELD 1";

/// Writes a field as a text header terminated by `end` followed by little-endian f64 (re, im) pairs.
pub fn write_field(path: &Path, state: &FieldState, seed: Option<(u64, u64)>) -> Result<()> {
    let g = &state.grid;
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(f, "{MAGIC}")?;
    writeln!(f, "dims {}", dims_name(g.dims))?;
    writeln!(f, "n_x {}\nn_y {}\nn_t {}\nn_z {}", g.n_x, g.n_y, g.n_t, g.n_z)?;
    writeln!(f, "l_x {:e}\nl_y {:e}\nt_win {:e}", g.l_x, g.l_y, g.t_win)?;
    writeln!(f, "z {:e}", state.plane_z)?;
    writeln!(f, "domain {}", if state.domain == Domain::RealSpace { "real" } else { "fourier" })?;
    if let Some((m, i)) = seed {
        writeln!(f, "seed {m} {i}")?;
    }
    writeln!(f, "envelopes {}", state.envelopes.len())?;
    writeln!(f, "dtype complex128\nendianness little\nlayout envelope,t,y,x\nend")?;
    for e in &state.envelopes {
        for a in e {
            f.write_all(&a.re.to_le_bytes())?;
            f.write_all(&a.im.to_le_bytes())?;
        }
    }
    f.flush()?;
    Ok(())
}

fn dims_name(d: GridDims) -> &'static str {
    match d {
        GridDims::Xt => "xt",
        GridDims::Xy => "xy",
        GridDims::Xyt => "xyt",
    }
}

pub fn read_field(path: &Path) -> Result<FieldState> {
    let bad = |m: &str| Error::Config(format!("{}: {m}", path.display()));
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut line = String::new();
    r.read_line(&mut line)?;
    if line.trim() != MAGIC {
        return Err(bad("not a field dump"));
    }
    let mut kv = std::collections::HashMap::new();
    loop {
        line.clear();
        if r.read_line(&mut line)? == 0 {
            return Err(bad("truncated header"));
        }
        let l = line.trim();
        if l == "end" {
            break;
        }
        if let Some((k, v)) = l.split_once(' ') {
            kv.insert(k.to_string(), v.to_string());
        }
    }
    let get = |k: &str| kv.get(k).ok_or_else(|| bad(&format!("missing {k}")));
    let num = |k: &str| -> Result<f64> { get(k)?.parse().map_err(|_| bad(k)) };
    let int = |k: &str| -> Result<usize> { get(k)?.parse().map_err(|_| bad(k)) };
    let dims = match get("dims")?.as_str() {
        "xt" => GridDims::Xt,
        "xy" => GridDims::Xy,
        "xyt" => GridDims::Xyt,
        _ => return Err(bad("dims")),
    };
    let grid = GridSpec {
        dims,
        n_x: int("n_x")?,
        n_y: int("n_y")?,
        n_t: int("n_t")?,
        l_x: num("l_x")?,
        l_y: num("l_y")?,
        t_win: num("t_win")?,
        n_z: int("n_z")?,
    };
    let n = grid.shape().len();
    let n_env = int("envelopes")?;
    let mut buf = vec![0u8; 16 * n];
    let mut envelopes = Vec::with_capacity(n_env);
    for _ in 0..n_env {
        r.read_exact(&mut buf)?;
        envelopes.push(
            buf.chunks_exact(16)
                .map(|c| {
                    Complex64::new(
                        f64::from_le_bytes(c[..8].try_into().unwrap()),
                        f64::from_le_bytes(c[8..].try_into().unwrap()),
                    )
                })
                .collect(),
        );
    }
    let domain = if get("domain")? == "real" { Domain::RealSpace } else { Domain::FourierSpace };
    Ok(FieldState { grid, plane_z: num("z")?, domain, envelopes })
}
