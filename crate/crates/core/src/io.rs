//! File formats: the JSON case document and the two scenario CSVs.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::types::{CaseInputs, EvRecord, Scenario, ScenarioSet};

pub const LOAD_HEADER: [&str; 5] = ["scenario", "hour", "elec_load_kw", "heat_load_kw", "pv_avail_kw"];
pub const EV_HEADER: [&str; 5] = ["scenario", "ev_id", "arrive_hour", "depart_hour", "initial_soc"];

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line() as u64,
        column: e.column(),
        msg: e.to_string(),
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_case(path: &Path) -> Result<CaseInputs> {
    let case: CaseInputs = read_json(path)?;
    case.validate()?;
    Ok(case)
}

/// Render both scenario CSVs. Floats use the shortest round-trip form so
/// parse(render(x)) == x and output is byte-stable.
pub fn scenarios_to_csv(set: &ScenarioSet) -> (String, String) {
    let mut loads = LOAD_HEADER.join(",");
    loads.push('\n');
    let mut evs = EV_HEADER.join(",");
    evs.push('\n');
    for (s, sc) in set.scenarios.iter().enumerate() {
        for t in 0..set.hours {
            loads.push_str(&format!("{s},{t},{},{},{}\n", sc.elec_load[t], sc.heat_load[t], sc.pv_avail[t]));
        }
        for (j, ev) in sc.evs.iter().enumerate() {
            evs.push_str(&format!("{s},{j},{},{},{}\n", ev.arrive_hour, ev.depart_hour, ev.initial_soc));
        }
    }
    (loads, evs)
}

pub fn write_scenarios(set: &ScenarioSet, load_path: &Path, ev_path: &Path) -> Result<()> {
    let (loads, evs) = scenarios_to_csv(set);
    fs::write(load_path, loads).map_err(|e| Error::io(load_path, e))?;
    fs::write(ev_path, evs).map_err(|e| Error::io(ev_path, e))
}

pub fn read_scenarios(load_path: &Path, ev_path: Option<&Path>) -> Result<ScenarioSet> {
    let loads = fs::read_to_string(load_path).map_err(|e| Error::io(load_path, e))?;
    let evs = match ev_path {
        Some(p) => Some(fs::read_to_string(p).map_err(|e| Error::io(p, e))?),
        None => None,
    };
    parse_scenarios(&loads, load_path, evs.as_deref(), ev_path.unwrap_or(Path::new("<none>")))
}

struct Table<'a> {
    path: &'a Path,
    reader: csv::Reader<&'a [u8]>,
}

impl<'a> Table<'a> {
    fn open(text: &'a str, path: &'a Path, header: &[&str]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let got = reader.headers().map_err(|e| csv_error(path, e))?.clone();
        let got: Vec<&str> = got.iter().collect();
        if got != header {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: 1,
                column: 1,
                msg: format!("expected header {:?}, found {:?}", header.join(","), got.join(",")),
            });
        }
        Ok(Table { path, reader })
    }

    fn rows(&mut self, mut f: impl FnMut(&Row<'_>) -> Result<()>) -> Result<()> {
        for rec in self.reader.records() {
            let rec = rec.map_err(|e| csv_error(self.path, e))?;
            let line = rec.position().map_or(0, |p| p.line());
            f(&Row { path: self.path, line, rec: &rec })?;
        }
        Ok(())
    }
}

struct Row<'a> {
    path: &'a Path,
    line: u64,
    rec: &'a csv::StringRecord,
}

impl Row<'_> {
    fn error(&self, column: usize, msg: String) -> Error {
        Error::Parse { path: self.path.to_path_buf(), line: self.line, column: column + 1, msg }
    }

    fn parse<T: std::str::FromStr>(&self, column: usize, what: &str) -> Result<T> {
        let raw = self.rec.get(column).unwrap_or("");
        raw.parse().map_err(|_| self.error(column, format!("cannot parse {what} from {raw:?}")))
    }

    fn float(&self, column: usize, what: &str) -> Result<f64> {
        let v: f64 = self.parse(column, what)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.error(column, format!("{what} must be finite")))
        }
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse { path: path.to_path_buf(), line, column: 1, msg: e.to_string() }
}

type LoadRow = (f64, f64, f64);

/// Parse the load CSV and optional EV CSV. Scenario ids must be 0..N and
/// hours 0..T with every (scenario, hour) pair present exactly once.
pub fn parse_scenarios(
    load_text: &str,
    load_path: &Path,
    ev_text: Option<&str>,
    ev_path: &Path,
) -> Result<ScenarioSet> {
    let mut cells: BTreeMap<(usize, usize), LoadRow> = BTreeMap::new();
    let mut table = Table::open(load_text, load_path, &LOAD_HEADER)?;
    table.rows(|r| {
        let s: usize = r.parse(0, "scenario index")?;
        let t: usize = r.parse(1, "hour")?;
        let v = (r.float(2, "electric load")?, r.float(3, "heat load")?, r.float(4, "PV availability")?);
        if cells.insert((s, t), v).is_some() {
            return Err(r.error(0, format!("duplicate row for scenario {s} hour {t}")));
        }
        Ok(())
    })?;
    if cells.is_empty() {
        return Err(Error::Parse { path: load_path.to_path_buf(), line: 2, column: 1, msg: "no scenario rows".into() });
    }
    let n = cells.keys().map(|k| k.0).max().unwrap_or(0) + 1;
    let hours = cells.keys().map(|k| k.1).max().unwrap_or(0) + 1;
    if cells.len() != n * hours {
        let missing =
            (0..n).flat_map(|s| (0..hours).map(move |t| (s, t))).find(|k| !cells.contains_key(k)).unwrap_or((0, 0));
        return Err(Error::Parse {
            path: load_path.to_path_buf(),
            line: 0,
            column: 1,
            msg: format!("missing row for scenario {} hour {}", missing.0, missing.1),
        });
    }
    let mut scenarios: Vec<Scenario> = (0..n)
        .map(|s| {
            let col = |f: fn(&LoadRow) -> f64| (0..hours).map(|t| f(&cells[&(s, t)])).collect::<Vec<_>>();
            Scenario { elec_load: col(|v| v.0), heat_load: col(|v| v.1), pv_avail: col(|v| v.2), evs: Vec::new() }
        })
        .collect();

    if let Some(text) = ev_text {
        let mut evs: BTreeMap<(usize, usize), EvRecord> = BTreeMap::new();
        let mut table = Table::open(text, ev_path, &EV_HEADER)?;
        table.rows(|r| {
            let s: usize = r.parse(0, "scenario index")?;
            if s >= n {
                return Err(r.error(0, format!("scenario {s} has no load rows")));
            }
            let j: usize = r.parse(1, "EV id")?;
            let rec = EvRecord {
                arrive_hour: r.parse(2, "arrival hour")?,
                depart_hour: r.parse(3, "departure hour")?,
                initial_soc: r.float(4, "initial SOC")?,
            };
            if evs.insert((s, j), rec).is_some() {
                return Err(r.error(1, format!("duplicate EV {j} in scenario {s}")));
            }
            Ok(())
        })?;
        for ((s, j), rec) in evs {
            if j != scenarios[s].evs.len() {
                return Err(Error::Parse {
                    path: ev_path.to_path_buf(),
                    line: 0,
                    column: 2,
                    msg: format!("scenario {s}: EV ids must be contiguous from 0, missing {}", scenarios[s].evs.len()),
                });
            }
            scenarios[s].evs.push(rec);
        }
    }
    Ok(ScenarioSet { hours, scenarios })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ScenarioSet {
        ScenarioSet {
            hours: 2,
            scenarios: vec![
                Scenario {
                    elec_load: vec![10.5, 0.1 + 0.2],
                    heat_load: vec![0.0, 3.0],
                    pv_avail: vec![0.0, 123.456789],
                    evs: vec![EvRecord { arrive_hour: 0, depart_hour: 2, initial_soc: 0.35 }],
                },
                Scenario {
                    elec_load: vec![1.0, 2.0],
                    heat_load: vec![1e-9, 3.0],
                    pv_avail: vec![0.0, 0.0],
                    evs: vec![EvRecord { arrive_hour: 1, depart_hour: 2, initial_soc: 1.0 }],
                },
            ],
        }
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let set = sample();
        let (l, e) = scenarios_to_csv(&set);
        let back = parse_scenarios(&l, Path::new("l.csv"), Some(&e), Path::new("e.csv")).unwrap();
        assert_eq!(back, set);
        assert_eq!(scenarios_to_csv(&back), (l, e));
    }

    #[test]
    fn parse_error_carries_line_and_column() {
        let text = "scenario,hour,elec_load_kw,heat_load_kw,pv_avail_kw\n0,0,1,2,3\n0,1,1,x,3\n";
        match parse_scenarios(text, Path::new("l.csv"), None, Path::new("")) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 4)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_header_and_gaps_are_rejected() {
        let bad = "scenario,hour,elec,heat,pv\n0,0,1,2,3\n";
        assert!(parse_scenarios(bad, Path::new("l"), None, Path::new("")).is_err());
        let gap = "scenario,hour,elec_load_kw,heat_load_kw,pv_avail_kw\n0,0,1,2,3\n1,1,1,2,3\n";
        assert!(parse_scenarios(gap, Path::new("l"), None, Path::new("")).is_err());
    }
}
