//! Run reports and the status document rendered from them: layered
//! verdicts, known discrepancies of the property suite and failure-monitor
//! trips with their clock readings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::checker::{Outcome, StateGraph, Trace, Verdict};
use crate::contracts::{Facet, LayerReport, LayerResult};
use crate::models::names::{DOOR, GEAR};
use crate::models::{monitors, Component, Monitor};
use crate::props::{Pred, MAPPING};
use crate::ta::{Snapshot, Step, System};

/// Output of a checking run, as written by `lgs check --json`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<String>,
    pub states: usize,
    pub transitions: usize,
    pub depth: usize,
    pub truncated: bool,
    pub verdicts: Vec<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub layers: Option<LayerReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trips: Vec<MonitorTrip>,
}

impl RunReport {
    /// All universal properties hold and all witnesses are found.
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.result.is_success())
            && self.layers.as_ref().is_none_or(LayerReport::passed)
    }

    pub fn verdict(&self, property: &str) -> Option<&Verdict> {
        self.verdicts
            .iter()
            .chain(
                self.layers
                    .iter()
                    .flat_map(|l| l.layers.iter().flat_map(|r| r.verdicts.iter())),
            )
            .find(|v| v.property.eq_ignore_ascii_case(property))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub property: String,
    pub summary: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observed: Option<Outcome>,
}

const KNOWN: [(&str, &str); 3] = [
    (
        "P16",
        "retraction completion is stated at ck_gear==20; the timing table gives 24 to retract and 28 to lock high",
    ),
    ("P28", "threshold ck_door>44 lies inside the nominal extension closing window (40..52), so the monitor trips on nominal runs"),
    (
        "P33",
        "gear_locked_down==false holds on every nominal retraction once the gear moves; the monitor watches the unlocking phase instead",
    ),
];

/// Properties whose constants or literals disagree with the timing table.
pub fn known_discrepancies() -> Vec<Discrepancy> {
    KNOWN
        .iter()
        .map(|(p, s)| Discrepancy {
            property: p.to_string(),
            summary: s.to_string(),
            observed: None,
        })
        .collect()
}

/// A component moving to its failed location, with the monitors whose
/// conditions were met just before.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonitorTrip {
    pub component: Component,
    pub monitors: Vec<String>,
    pub failure: String,
    /// Location the component failed from.
    pub from: String,
    pub ck_door: u32,
    pub ck_gear: u32,
    /// Index of the failing step in the trace, when taken from one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
}

fn automaton(c: Component) -> &'static str {
    match c {
        Component::Door => DOOR,
        Component::Gear => GEAR,
    }
}

fn holds(m: &Monitor, s: &Snapshot) -> bool {
    let value = |name: &str| {
        s.vars
            .get(name)
            .map(|v| v.as_i64())
            .or_else(|| s.clocks.get(name).map(|&c| c as i64))
    };
    m.conditions
        .iter()
        .all(|c| value(&c.lhs).is_some_and(|v| c.op.eval(v, c.rhs.as_i64())))
        && s.clocks.get(m.clock).is_some_and(|&c| c > m.threshold)
}

/// Trips between two consecutive snapshots.
pub fn trips_between(before: &Snapshot, after: &Snapshot) -> Vec<MonitorTrip> {
    let all = monitors();
    [Component::Door, Component::Gear]
        .into_iter()
        .filter_map(|c| {
            let a = automaton(c);
            let from = before.locations.get(a)?;
            if from == "failed" || after.locations.get(a).map(String::as_str) != Some("failed") {
                return None;
            }
            let matching: Vec<&Monitor> = all
                .iter()
                .filter(|m| {
                    m.component == c && m.sources.contains(&from.as_str()) && holds(m, before)
                })
                .collect();
            Some(MonitorTrip {
                component: c,
                monitors: matching.iter().map(|m| m.id.to_string()).collect(),
                failure: matching
                    .first()
                    .map_or(String::new(), |m| m.failure_var().to_string()),
                from: from.clone(),
                ck_door: before
                    .clocks
                    .get(crate::models::names::CK_DOOR)
                    .copied()
                    .unwrap_or(0),
                ck_gear: before
                    .clocks
                    .get(crate::models::names::CK_GEAR)
                    .copied()
                    .unwrap_or(0),
                step: None,
            })
        })
        .collect()
}

/// Every trip along a trace.
pub fn monitor_trips(trace: &Trace) -> Vec<MonitorTrip> {
    let mut out = Vec::new();
    let mut before = &trace.initial;
    for (i, s) in trace.steps.iter().enumerate() {
        for mut t in trips_between(before, &s.state) {
            t.step = Some(i);
            out.push(t);
        }
        before = &s.state;
    }
    out
}

fn failed_preds(sys: &System) -> Vec<Pred> {
    [DOOR, GEAR]
        .into_iter()
        .filter_map(|a| sys.location_ref(a, "failed"))
        .map(|(automaton, location)| Pred::At {
            automaton,
            location,
        })
        .collect()
}

/// Shortest run (in BFS order) ending with a trip that satisfies `select`,
/// and that trip.
pub fn find_trip(
    sys: &System,
    g: &StateGraph,
    select: impl Fn(&MonitorTrip) -> bool,
) -> Option<(Trace, MonitorTrip)> {
    let failed = failed_preds(sys);
    for (i, s) in g.states.iter().enumerate() {
        let was: Vec<bool> = failed.iter().map(|p| p.eval(s)).collect();
        let mut before = None;
        for &(step, t) in &g.succ[i] {
            let fails = failed
                .iter()
                .zip(&was)
                .any(|(p, w)| !w && p.eval(&g.states[t as usize]));
            if !fails || !matches!(step, Step::Discrete(_)) {
                continue;
            }
            let b = before.get_or_insert_with(|| sys.snapshot(s));
            let after = sys.snapshot(&g.states[t as usize]);
            if let Some(trip) = trips_between(b, &after).into_iter().find(|x| select(x)) {
                let mut path = g.path_to(i as u32);
                path.push((step, t));
                let trace = Trace::from_path(sys, g, 0, &path);
                let trip = MonitorTrip {
                    step: Some(trace.steps.len() - 1),
                    ..trip
                };
                return Some((trace, trip));
            }
        }
    }
    None
}

/// Every distinct monitor set that trips somewhere in the graph, with its
/// smallest clock readings.
pub fn reachable_trips(sys: &System, g: &StateGraph) -> Vec<MonitorTrip> {
    let failed = failed_preds(sys);
    let mut out: Vec<MonitorTrip> = Vec::new();
    for (i, s) in g.states.iter().enumerate() {
        let was: Vec<bool> = failed.iter().map(|p| p.eval(s)).collect();
        let mut before = None;
        for &(_, t) in &g.succ[i] {
            if !failed
                .iter()
                .zip(&was)
                .any(|(p, w)| !w && p.eval(&g.states[t as usize]))
            {
                continue;
            }
            let b = before.get_or_insert_with(|| sys.snapshot(s));
            for trip in trips_between(b, &sys.snapshot(&g.states[t as usize])) {
                match out
                    .iter_mut()
                    .find(|o| o.monitors == trip.monitors && o.from == trip.from)
                {
                    Some(o) => {
                        o.ck_door = o.ck_door.min(trip.ck_door);
                        o.ck_gear = o.ck_gear.min(trip.ck_gear);
                    }
                    None => out.push(trip),
                }
            }
        }
    }
    out.sort_by(|a, b| a.monitors.cmp(&b.monitors).then(a.from.cmp(&b.from)));
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingEntry {
    pub form: String,
    pub query: String,
}

/// Layered status of a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusDocument {
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault: Option<String>,
    pub mapping: Vec<MappingEntry>,
    pub layers: Vec<LayerResult>,
    pub stopped_at: Option<Facet>,
    pub discrepancies: Vec<Discrepancy>,
    pub trips: Vec<MonitorTrip>,
}

/// Layers from verdict facets: every layer with verdicts counts as checked.
fn layers_from_verdicts(verdicts: &[Verdict]) -> LayerReport {
    let layers: Vec<LayerResult> = Facet::ALL
        .into_iter()
        .map(|f| {
            let vs: Vec<Verdict> = verdicts
                .iter()
                .filter(|v| v.facet == Some(f))
                .cloned()
                .collect();
            LayerResult {
                facet: f,
                priority: f.priority(),
                checked: !vs.is_empty(),
                passed: vs.iter().all(|v| v.result.is_success()),
                verdicts: vs,
                unchecked: Vec::new(),
            }
        })
        .collect();
    let stopped_at = layers.iter().find(|l| !l.passed).map(|l| l.facet);
    LayerReport { layers, stopped_at }
}

pub fn status(run: &RunReport) -> StatusDocument {
    let layered = run
        .layers
        .clone()
        .unwrap_or_else(|| layers_from_verdicts(&run.verdicts));
    let discrepancies = known_discrepancies()
        .into_iter()
        .map(|d| Discrepancy {
            observed: run.verdict(&d.property).map(|v| v.result),
            ..d
        })
        .collect();
    StatusDocument {
        model: run.model.clone(),
        fault: run.fault.clone(),
        mapping: MAPPING
            .iter()
            .map(|r| MappingEntry {
                form: r.form.into(),
                query: r.query.into(),
            })
            .collect(),
        layers: layered.layers,
        stopped_at: layered.stopped_at,
        discrepancies,
        trips: run.trips.clone(),
    }
}

fn paint(color: bool, code: &str, text: &str) -> String {
    if color {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

fn outcome_cell(color: bool, o: Outcome) -> String {
    let code = if o.is_success() { "32" } else { "31" };
    paint(color, code, &format!("{:<14}", o.as_str()))
}

/// Per-property table: name, facet, result, states, time.
pub fn verdict_table(verdicts: &[Verdict], color: bool) -> String {
    let mut out = format!(
        "{:<8} {:<14} {:<14} {:>9} {:>8}\n",
        "property", "facet", "result", "states", "ms"
    );
    for v in verdicts {
        let facet = v.facet.map_or("-", Facet::name);
        let _ = write!(
            out,
            "{:<8} {:<14} {} {:>9} {:>8}",
            v.property,
            facet,
            outcome_cell(color, v.result),
            v.states,
            v.time_ms
        );
        if let Some(n) = &v.note {
            let _ = write!(out, "  {n}");
        }
        out.push('\n');
    }
    out
}

pub fn render_trip(t: &MonitorTrip) -> String {
    let ids = if t.monitors.is_empty() {
        "?".to_string()
    } else {
        t.monitors.join(",")
    };
    format!(
        "{} failed from {} [{ids}] at ck_door={} ck_gear={}",
        t.component, t.from, t.ck_door, t.ck_gear
    )
}

pub fn render_status(doc: &StatusDocument, color: bool) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model: {}", doc.model);
    if let Some(f) = &doc.fault {
        let _ = writeln!(out, "fault: {f}");
    }
    out.push_str("\nquery mapping:\n");
    for m in &doc.mapping {
        let _ = writeln!(out, "  {:<34} => {}", m.form, m.query);
    }
    out.push_str("\nlayers:\n");
    for l in &doc.layers {
        let state = match (l.checked, l.passed) {
            (false, _) => paint(color, "33", "not checked"),
            (true, true) => paint(color, "32", "passed"),
            (true, false) => paint(color, "31", "failed"),
        };
        let _ = writeln!(
            out,
            "  {} {:<14} {state} ({} properties)",
            l.priority,
            l.facet.name(),
            l.verdicts.len()
        );
        for v in l.verdicts.iter().filter(|v| !v.result.is_success()) {
            let _ = writeln!(out, "      {:<6} {}", v.property, v.result);
        }
        if !l.unchecked.is_empty() {
            let _ = writeln!(out, "      unchecked: {}", l.unchecked.join(", "));
        }
    }
    match doc.stopped_at {
        Some(f) => {
            let _ = writeln!(out, "stopped_at={f}");
        }
        None => out.push_str("stopped_at=none\n"),
    }
    out.push_str("\ndiscrepancies:\n");
    for d in &doc.discrepancies {
        let observed = d.observed.map_or("not run".to_string(), |o| o.to_string());
        let _ = writeln!(out, "  {:<4} [{observed}] {}", d.property, d.summary);
    }
    if !doc.trips.is_empty() {
        out.push_str("\ntripped monitors:\n");
        for t in &doc.trips {
            let _ = writeln!(out, "  {}", render_trip(t));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contracts::LayerResult;

    fn verdict(name: &str, facet: Facet, result: Outcome) -> Verdict {
        Verdict {
            property: name.into(),
            facet: Some(facet),
            query: String::new(),
            result,
            states: 1,
            transitions: 0,
            time_ms: 0,
            note: None,
            trace: None,
        }
    }

    fn run(verdicts: Vec<Verdict>) -> RunReport {
        RunReport {
            model: "m".into(),
            fault: None,
            states: 1,
            transitions: 0,
            depth: 0,
            truncated: false,
            verdicts,
            layers: None,
            trips: Vec::new(),
        }
    }

    #[test]
    fn layers_in_priority_order() {
        let r = run(vec![
            verdict("P5", Facet::Safety, Outcome::Holds),
            verdict("P36", Facet::Data, Outcome::Holds),
        ]);
        let doc = status(&r);
        let order: Vec<Facet> = doc.layers.iter().map(|l| l.facet).collect();
        assert_eq!(order, Facet::ALL);
        assert_eq!(doc.stopped_at, None);
        assert!(!doc.layers[2].checked);
    }

    #[test]
    fn discrepancies_carry_observed_outcome() {
        let r = run(vec![verdict("P16", Facet::Safety, Outcome::WitnessAbsent)]);
        let doc = status(&r);
        let ids: Vec<&str> = doc
            .discrepancies
            .iter()
            .map(|d| d.property.as_str())
            .collect();
        assert_eq!(ids, ["P16", "P28", "P33"]);
        assert_eq!(doc.discrepancies[0].observed, Some(Outcome::WitnessAbsent));
        assert_eq!(doc.discrepancies[1].observed, None);
        assert_eq!(doc.stopped_at, Some(Facet::Safety));
    }

    #[test]
    fn stop_point_from_layer_report() {
        let mut r = run(Vec::new());
        r.layers = Some(LayerReport {
            layers: Facet::ALL
                .into_iter()
                .map(|f| LayerResult {
                    facet: f,
                    priority: f.priority(),
                    checked: f == Facet::Data,
                    passed: f != Facet::Data,
                    verdicts: Vec::new(),
                    unchecked: Vec::new(),
                })
                .collect(),
            stopped_at: Some(Facet::Data),
        });
        let text = render_status(&status(&r), false);
        assert!(text.contains("stopped_at=DATA"));
        assert!(text.contains("2 SAFETY         not checked"));
        assert!(!text.contains('\x1b'));
    }

    #[test]
    fn table_columns() {
        let t = verdict_table(&[verdict("P5", Facet::Safety, Outcome::Holds)], false);
        let lines: Vec<&str> = t.lines().collect();
        assert!(lines[0].starts_with("property facet"));
        assert!(lines[1].starts_with("P5       SAFETY         holds"));
        assert!(
            verdict_table(&[verdict("P5", Facet::Safety, Outcome::Violated)], true)
                .contains("\x1b[31m")
        );
    }
}
