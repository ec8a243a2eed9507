//! The twelve-step transformation, keeping every intermediate artifact.

use std::fmt;
use std::time::{Duration, Instant};

use crate::cfg::{self, Cfg, StepThreeMode};
use crate::epda::{self, Epda, Provenance};
use crate::error::{Error, Result};
use crate::io::{write_cfg, write_epda, write_parser};
use crate::lr::{self, LrContext, LrMachine};
use crate::parser::{self, LrParser};
use crate::reach::{self, PruneReport};

pub const STEP_NAMES: [&str; 13] = [
    "input",
    "simple",
    "single marking",
    "grammar",
    "trimmed grammar",
    "augmented grammar",
    "lr machine",
    "parser",
    "end marker removed",
    "lookahead internalized",
    "extended automaton",
    "one-popping automaton",
    "accessible automaton",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Artifact {
    Epda(Epda),
    Cfg(Cfg),
    /// The machine together with the augmented grammar it was built from.
    Machine(Box<Cfg>, LrMachine),
    Parser(LrParser),
}

impl Artifact {
    pub fn kind(&self) -> &'static str {
        match self {
            Artifact::Epda(_) => "automaton",
            Artifact::Cfg(_) => "grammar",
            Artifact::Machine(..) => "machine",
            Artifact::Parser(_) => "parser",
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Artifact::Epda(a) => a.edges.len(),
            Artifact::Cfg(g) => g.productions.len(),
            Artifact::Machine(_, m) => m.states.len(),
            Artifact::Parser(p) => p.rules.len(),
        }
    }
}

impl fmt::Display for Artifact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Artifact::Epda(a) => f.write_str(&write_epda(a)),
            Artifact::Cfg(g) => f.write_str(&write_cfg(g)),
            Artifact::Machine(g, m) => {
                let ctx = LrContext::new(g);
                for (i, s) in m.states.iter().enumerate() {
                    writeln!(f, "{}:", LrMachine::state_name(i))?;
                    for it in s {
                        writeln!(f, "  {}", ctx.render_item(it))?;
                    }
                }
                for (&(p, x), &q) in &m.edges {
                    writeln!(
                        f,
                        "{} --{}--> {}",
                        LrMachine::state_name(p),
                        g.symbol_name(x),
                        LrMachine::state_name(q)
                    )?;
                }
                Ok(())
            }
            Artifact::Parser(p) => f.write_str(&write_parser(p)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Stage {
    pub step: usize,
    pub artifact: Artifact,
    pub elapsed: Duration,
    /// Maps edges or productions back to the previous stage, where the step
    /// records it.
    pub provenance: Option<Provenance>,
    pub pruned: Option<PruneReport>,
}

impl Stage {
    pub fn name(&self) -> &'static str {
        STEP_NAMES[self.step]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Options {
    /// Prefix length for pruning after steps 0, 1, 2 and 11; `None` disables
    /// pruning.
    pub k: Option<usize>,
    pub grammar_mode: StepThreeMode,
    /// Stop after this step.
    pub last: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            k: Some(1),
            grammar_mode: StepThreeMode::Full,
            last: 12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub stages: Vec<Stage>,
    pub aborted: Option<Error>,
}

impl PipelineRun {
    pub fn stage(&self, step: usize) -> Option<&Stage> {
        self.stages.iter().find(|s| s.step == step)
    }

    pub fn epda(&self, step: usize) -> Option<&Epda> {
        match &self.stage(step)?.artifact {
            Artifact::Epda(a) => Some(a),
            _ => None,
        }
    }

    pub fn cfg(&self, step: usize) -> Option<&Cfg> {
        match &self.stage(step)?.artifact {
            Artifact::Cfg(g) => Some(g),
            _ => None,
        }
    }

    pub fn machine(&self, step: usize) -> Option<(&Cfg, &LrMachine)> {
        match &self.stage(step)?.artifact {
            Artifact::Machine(g, m) => Some((g, m)),
            _ => None,
        }
    }

    pub fn parser(&self, step: usize) -> Option<&LrParser> {
        match &self.stage(step)?.artifact {
            Artifact::Parser(p) => Some(p),
            _ => None,
        }
    }

    /// The final automaton, or the reason the run stopped early.
    pub fn output(&self) -> Result<&Epda> {
        if let Some(e) = &self.aborted {
            return Err(e.clone());
        }
        self.epda(12)
            .ok_or_else(|| Error::Precondition("the run stopped before the last step".into()))
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for s in &self.stages {
            let pruned = s.pruned.as_ref().map_or(String::new(), |p| {
                format!(", pruned {} states {} edges", p.removed_states.len(), p.removed_edges.len())
            });
            out.push_str(&format!(
                "{:>2} {:<24} {:<9} size {:>6} {:>9.2?}{}\n",
                s.step,
                s.name(),
                s.artifact.kind(),
                s.artifact.size(),
                s.elapsed,
                pruned
            ));
        }
        if let Some(e) = &self.aborted {
            out.push_str(&format!("aborted: {}\n", e));
        }
        out
    }
}

struct Runner {
    opts: Options,
    stages: Vec<Stage>,
}

impl Runner {
    fn push(&mut self, step: usize, artifact: Artifact, t: Instant, provenance: Option<Provenance>) -> bool {
        self.stages.push(Stage {
            step,
            artifact,
            elapsed: t.elapsed(),
            provenance,
            pruned: None,
        });
        step < self.opts.last
    }

    fn pruned(&mut self, step: usize, a: Epda, t: Instant, provenance: Option<Provenance>) -> Result<bool> {
        let (a, report) = match self.opts.k {
            Some(k) => {
                let (b, r) = reach::prune_obvious(&a, k)?;
                (b, Some(r))
            }
            None => (a, None),
        };
        let go = self.push(step, Artifact::Epda(a), t, provenance);
        self.stages.last_mut().unwrap().pruned = report;
        Ok(go)
    }

    fn last_epda(&self) -> &Epda {
        match &self.stages.last().unwrap().artifact {
            Artifact::Epda(a) => a,
            _ => unreachable!(),
        }
    }

    fn last_cfg(&self) -> &Cfg {
        match &self.stages.last().unwrap().artifact {
            Artifact::Cfg(g) => g,
            _ => unreachable!(),
        }
    }

    fn last_parser(&self) -> &LrParser {
        match &self.stages.last().unwrap().artifact {
            Artifact::Parser(p) => p,
            _ => unreachable!(),
        }
    }

    fn run(&mut self, m0: &Epda) -> Result<()> {
        let t = Instant::now();
        m0.check_valid()?;
        m0.require_dpda()?;
        if !self.pruned(0, m0.clone(), t, None)? {
            return Ok(());
        }

        let t = Instant::now();
        let (m1, p1) = epda::to_sdpda(self.last_epda())?;
        if !self.pruned(1, m1, t, Some(p1))? {
            return Ok(());
        }

        let t = Instant::now();
        let (m2, p2) = epda::remove_double_marking(self.last_epda())?;
        if !self.pruned(2, m2, t, Some(p2))? {
            return Ok(());
        }

        let t = Instant::now();
        let (g3, p3) = cfg::sdpda_to_cfg_with(self.last_epda(), self.opts.grammar_mode)?;
        if !self.push(3, Artifact::Cfg(g3), t, Some(p3)) {
            return Ok(());
        }

        let t = Instant::now();
        let (g4, kept) = cfg::trim(self.last_cfg())?;
        let p4 = Provenance {
            origins: kept.into_iter().map(epda::Origin::Edge).collect(),
        };
        if !self.push(4, Artifact::Cfg(g4), t, Some(p4)) {
            return Ok(());
        }

        let t = Instant::now();
        let g5 = cfg::augment(self.last_cfg())?;
        if !self.push(5, Artifact::Cfg(g5), t, None) {
            return Ok(());
        }

        let t = Instant::now();
        let g5 = self.last_cfg().clone();
        let m6 = lr::build_lr_machine(&g5)?;
        if !self.push(6, Artifact::Machine(Box::new(g5.clone()), m6.clone()), t, None) {
            return Ok(());
        }

        let t = Instant::now();
        let m7 = lr::build_parser(&g5, &m6)?;
        if !self.push(7, Artifact::Parser(m7), t, None) {
            return Ok(());
        }

        let t = Instant::now();
        let m8 = parser::strip_end_marker(self.last_parser());
        if !self.push(8, Artifact::Parser(m8), t, None) {
            return Ok(());
        }

        let t = Instant::now();
        let m9 = parser::internalize_fixed_output(self.last_parser());
        if !self.push(9, Artifact::Parser(m9), t, None) {
            return Ok(());
        }

        let t = Instant::now();
        let m10 = parser::parser_to_edpda(self.last_parser())?;
        if !self.push(10, Artifact::Epda(m10), t, None) {
            return Ok(());
        }

        let t = Instant::now();
        let m11 = epda::edpda_to_dpda(self.last_epda())?;
        if !self.pruned(11, m11, t, None)? {
            return Ok(());
        }

        let t = Instant::now();
        let keep = reach::accessible_edges(self.last_epda())?;
        let m12 = self.last_epda().restrict(&keep);
        let p12 = Provenance {
            origins: keep.into_iter().map(epda::Origin::Edge).collect(),
        };
        self.push(12, Artifact::Epda(m12), t, Some(p12));
        Ok(())
    }
}

pub fn run_pipeline(m0: &Epda, opts: Options) -> PipelineRun {
    let mut r = Runner {
        opts,
        stages: Vec::new(),
    };
    let aborted = r.run(m0).err();
    PipelineRun {
        stages: r.stages,
        aborted,
    }
}

/// Runs all steps with default options and returns the final automaton.
pub fn solve(m0: &Epda) -> Result<Epda> {
    run_pipeline(m0, Options::default()).output().cloned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn running_example_completes() {
        let run = run_pipeline(&corpus::running_example(), Options::default());
        assert!(run.aborted.is_none(), "{}", run.summary());
        assert_eq!(run.stages.len(), 13);
        let out = run.output().unwrap();
        assert!(out.classify().is_dpda());
    }

    #[test]
    fn empty_language_aborts_at_trim() {
        let run = run_pipeline(&corpus::empty_language(), Options::default());
        assert_eq!(run.aborted, Some(Error::EmptyLanguage));
        assert_eq!(run.stages.last().unwrap().step, 3);
    }

    #[test]
    fn stops_early() {
        let run = run_pipeline(
            &corpus::running_example(),
            Options {
                last: 2,
                ..Options::default()
            },
        );
        assert_eq!(run.stages.len(), 3);
        assert!(run.aborted.is_none());
        assert!(run.output().is_err());
    }
}
