//! Seeded generator of random loop-free `.mmpi` programs, for property
//! tests and benchmarks. Every generated program parses and classifies.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::frontend::{Ast, BinOp, Comparison, Expr, ProcessId, RelOp, Source, SourceProgram, Stmt, StmtKind};

#[derive(Debug, Clone)]
pub struct SynthConfig {
    /// Upper bound on statements, counting nested ones (`else`/`endif` excluded).
    pub max_statements: usize,
    pub max_sections: usize,
    /// Process ids are drawn from `0..processes`.
    pub processes: ProcessId,
    pub max_if_depth: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            max_statements: 30,
            max_sections: 3,
            processes: 4,
            max_if_depth: 2,
        }
    }
}

const VARS: &[&str] = &["a", "b", "x", "y", "sum"];
const RANK_VAR: &str = "myid";

struct Gen<'c> {
    rng: ChaCha8Rng,
    cfg: &'c SynthConfig,
    budget: usize,
}

impl Gen<'_> {
    fn take(&mut self) -> bool {
        if self.budget == 0 {
            return false;
        }
        self.budget -= 1;
        true
    }

    fn var(&mut self) -> String {
        VARS.choose(&mut self.rng).unwrap().to_string()
    }

    fn expr(&mut self, depth: usize, allow_rank: bool) -> Expr {
        let roll = self.rng.gen_range(0..10);
        if depth >= 2 || roll < 4 {
            return match self.rng.gen_range(0..10) {
                0..=5 => Expr::Var {
                    name: self.var(),
                    line: 0,
                },
                6 if allow_rank => Expr::Var {
                    name: RANK_VAR.into(),
                    line: 0,
                },
                _ => Expr::Int(self.rng.gen_range(0..20)),
            };
        }
        let op = *[BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div]
            .choose(&mut self.rng)
            .unwrap();
        Expr::Binary {
            op,
            lhs: Box::new(self.expr(depth + 1, allow_rank)),
            rhs: Box::new(self.expr(depth + 1, allow_rank)),
        }
    }

    fn assign(&mut self, allow_rank: bool) -> Stmt {
        Stmt {
            line: 0,
            kind: StmtKind::Assign {
                target: self.var(),
                value: self.expr(0, allow_rank),
            },
        }
    }

    fn condition(&mut self) -> Comparison {
        let op = *[RelOp::Eq, RelOp::Ne, RelOp::Lt, RelOp::Le, RelOp::Gt, RelOp::Ge]
            .choose(&mut self.rng)
            .unwrap();
        // conditions on the rank variable would declare process sections
        Comparison {
            lhs: self.expr(1, false),
            op,
            rhs: self.expr(1, false),
        }
    }

    fn body(&mut self, len: usize, depth: usize, in_section: bool) -> Vec<Stmt> {
        let mut out = Vec::new();
        for _ in 0..len {
            if !self.take() {
                break;
            }
            let roll = self.rng.gen_range(0..100);
            let stmt = if roll < 20 && depth < self.cfg.max_if_depth {
                let then_len = self.rng.gen_range(0..=3);
                let cond = self.condition();
                let then_branch = self.body(then_len, depth + 1, in_section);
                let else_branch = if self.rng.gen_bool(0.5) {
                    let n = self.rng.gen_range(0..=3);
                    Some((0, self.body(n, depth + 1, in_section)))
                } else {
                    None
                };
                Stmt {
                    line: 0,
                    kind: StmtKind::If {
                        cond,
                        then_branch,
                        else_branch,
                        endif_line: 0,
                    },
                }
            } else if in_section && roll < 38 {
                Stmt {
                    line: 0,
                    kind: StmtKind::Send {
                        var: self.var(),
                        dest: self.rng.gen_range(0..self.cfg.processes),
                        tag: self.rng.gen_bool(0.2).then(|| self.rng.gen_range(0..2)),
                    },
                }
            } else if in_section && roll < 56 {
                let source = if self.rng.gen_bool(0.3) {
                    Source::Any
                } else {
                    Source::Process(self.rng.gen_range(0..self.cfg.processes))
                };
                Stmt {
                    line: 0,
                    kind: StmtKind::Recv {
                        var: self.var(),
                        source,
                        tag: self.rng.gen_bool(0.2).then(|| self.rng.gen_range(0..2)),
                    },
                }
            } else {
                self.assign(in_section)
            };
            out.push(stmt);
        }
        out
    }

    fn section(&mut self, process: ProcessId) -> Option<Stmt> {
        if !self.take() {
            return None;
        }
        let len = self.rng.gen_range(0..=6);
        let body = self.body(len, 0, true);
        let cond = Comparison {
            lhs: Expr::Var {
                name: RANK_VAR.into(),
                line: 0,
            },
            op: RelOp::Eq,
            rhs: Expr::Int(process.into()),
        };
        Some(Stmt {
            line: 0,
            kind: StmtKind::If {
                cond,
                then_branch: body,
                else_branch: None,
                endif_line: 0,
            },
        })
    }
}

/// A random program: global prelude with `mpi_init`/rank/size, one or two
/// runs of process sections, optional global code in between, and usually
/// `mpi_finalize`.
pub fn generate_ast(seed: u64, cfg: &SynthConfig) -> Ast {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed),
        cfg,
        budget: 0,
    };
    let min = 8.min(cfg.max_statements);
    g.budget = g.rng.gen_range(min..=cfg.max_statements);

    let mut stmts = Vec::new();
    // Fixed skeleton: init, size, rank, finalize, end.
    g.budget = g.budget.saturating_sub(5);
    let prelude = g.rng.gen_range(0..=2);
    for _ in 0..prelude {
        if g.take() {
            stmts.push(g.assign(false));
        }
    }
    stmts.push(Stmt {
        line: 0,
        kind: StmtKind::Init,
    });
    stmts.push(Stmt {
        line: 0,
        kind: StmtKind::Size("np".into()),
    });
    stmts.push(Stmt {
        line: 0,
        kind: StmtKind::Rank(RANK_VAR.into()),
    });

    let mut ids: Vec<ProcessId> = (0..cfg.processes).collect();
    ids.shuffle(&mut g.rng);
    let total = g.rng.gen_range(0..=cfg.max_sections.min(ids.len()));
    let split = if total >= 2 && g.rng.gen_bool(0.3) {
        g.rng.gen_range(1..total)
    } else {
        total
    };
    for (i, &process) in ids.iter().take(total).enumerate() {
        if i == split {
            let n = g.rng.gen_range(1..=2);
            stmts.extend(g.body(n, 0, false));
        }
        if let Some(s) = g.section(process) {
            stmts.push(s);
        }
    }
    if g.rng.gen_bool(0.3) {
        stmts.extend(g.body(1, 0, false));
    }
    if g.rng.gen_bool(0.9) {
        stmts.push(Stmt {
            line: 0,
            kind: StmtKind::Finalize,
        });
    }
    stmts.push(Stmt {
        line: 0,
        kind: StmtKind::End,
    });
    Ast { statements: stmts }
}

pub fn generate_program(seed: u64, cfg: &SynthConfig) -> SourceProgram {
    let ast = generate_ast(seed, cfg);
    SourceProgram::from_text(format!("synth-{seed}.mmpi"), &ast.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::classify_statements;
    use crate::frontend::parse_source;

    #[test]
    fn generated_programs_are_valid_and_bounded() {
        let cfg = SynthConfig::default();
        for seed in 0..300 {
            let src = generate_program(seed, &cfg);
            let ast = parse_source(&src).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
            assert!(ast.len() <= cfg.max_statements, "seed {seed}: {} statements", ast.len());
            let cp = classify_statements(&ast).unwrap();
            assert!(cp.count(crate::classify::StatementType::ParallelIf) <= cfg.max_sections);
        }
    }

    #[test]
    fn deterministic() {
        let cfg = SynthConfig::default();
        assert_eq!(generate_program(7, &cfg), generate_program(7, &cfg));
    }
}
