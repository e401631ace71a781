//! Rank certificates: serialization and replay.

use std::fmt;

use super::bounds::RankBounds;
use super::rules::Rule;
use super::RankError;

/// One rule instance: inputs are bounds of neighbouring nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleApp {
    pub rule: Rule,
    pub cite: String,
    pub ins: Vec<RankBounds>,
    pub arg: String,
    pub out: RankBounds,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertNode {
    pub label: String,
    pub depth: usize,
    pub bounds: RankBounds,
    pub rules: Vec<RuleApp>,
}

/// Derivation tree in preorder; node bounds are the intersection of their rule outputs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankCertificate {
    pub nodes: Vec<CertNode>,
}

impl RankCertificate {
    pub fn root_bounds(&self) -> Option<&RankBounds> {
        self.nodes.first().map(|n| &n.bounds)
    }

    /// Applications at the root node.
    pub fn root_rules(&self) -> &[RuleApp] {
        self.nodes.first().map_or(&[], |n| &n.rules)
    }

    pub fn applications(&self) -> impl Iterator<Item = &RuleApp> {
        self.nodes.iter().flat_map(|n| &n.rules)
    }

    pub fn uses(&self, rule: Rule) -> bool {
        self.applications().any(|a| a.rule == rule)
    }

    /// Indices of the parent and children of every node.
    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        let mut stack: Vec<usize> = Vec::new();
        for (i, n) in self.nodes.iter().enumerate() {
            while stack.len() > n.depth {
                stack.pop();
            }
            if let Some(&p) = stack.last() {
                out[i].push(p);
                out[p].push(i);
            }
            stack.push(i);
        }
        out
    }

    /// Re-evaluates every rule and checks the node bounds; returns the root bounds.
    pub fn replay(&self) -> Result<RankBounds, RankError> {
        let root = self.nodes.first().ok_or_else(|| replay_err(0, "empty certificate"))?;
        if root.depth != 0 {
            return Err(replay_err(0, "root must have depth 0"));
        }
        for (i, w) in self.nodes.windows(2).enumerate() {
            if w[1].depth > w[0].depth + 1 || w[1].depth == 0 {
                return Err(replay_err(i + 1, "malformed nesting"));
            }
        }
        let nbrs = self.neighbours();
        for (i, n) in self.nodes.iter().enumerate() {
            let mut acc = RankBounds::unknown();
            for app in &n.rules {
                for b in &app.ins {
                    if !nbrs[i].iter().any(|&j| self.nodes[j].bounds == *b) {
                        return Err(replay_err(
                            i,
                            &format!("{} input {b} is not the bounds of an adjacent node", app.rule),
                        ));
                    }
                }
                let out = app.rule.eval(&app.ins, &app.arg)?;
                if out != app.out {
                    return Err(replay_err(
                        i,
                        &format!("{} recomputes to {out}, certificate says {}", app.rule, app.out),
                    ));
                }
                acc = acc.intersect(&out)?;
            }
            if acc != n.bounds {
                return Err(replay_err(i, &format!("rules give {acc}, node claims {}", n.bounds)));
            }
        }
        Ok(root.bounds.clone())
    }

    pub fn parse(text: &str) -> Result<RankCertificate, RankError> {
        let mut nodes: Vec<CertNode> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let indent = raw.len() - raw.trim_start().len();
            let line = raw.trim_start();
            if let Some(rest) = line.strip_prefix("NODE ") {
                let (label, b) = rest
                    .rsplit_once(" bounds=")
                    .ok_or_else(|| replay_err(lineno, "NODE without bounds"))?;
                if indent % 2 != 0 {
                    return Err(replay_err(lineno, "odd indentation"));
                }
                nodes.push(CertNode {
                    label: label.to_string(),
                    depth: indent / 2,
                    bounds: b.parse()?,
                    rules: Vec::new(),
                });
            } else if let Some(rest) = line.strip_prefix("RULE ") {
                let node = nodes
                    .last_mut()
                    .ok_or_else(|| replay_err(lineno, "RULE before any NODE"))?;
                node.rules.push(parse_rule(rest).map_err(|d| replay_err(lineno, &d))?);
            } else {
                return Err(replay_err(lineno, "expected NODE or RULE"));
            }
        }
        Ok(RankCertificate { nodes })
    }
}

fn replay_err(line: usize, detail: &str) -> RankError {
    RankError::Replay {
        line,
        detail: detail.to_string(),
    }
}

fn parse_rule(s: &str) -> Result<RuleApp, String> {
    let (name, rest) = s.split_once(' ').ok_or("truncated RULE line")?;
    let rule: Rule = name.parse().map_err(|e: RankError| e.to_string())?;
    let rest = rest.strip_prefix("cite=\"").ok_or("missing cite")?;
    let (cite, rest) = rest.split_once('"').ok_or("unterminated cite")?;
    let rest = rest.strip_prefix(" in=").ok_or("missing in=")?;
    let (ins, rest) = rest.split_once(" arg=").ok_or("missing arg=")?;
    let (arg, out) = rest.rsplit_once(" out=").ok_or("missing out=")?;
    let ins = if ins == "-" {
        Vec::new()
    } else {
        ins.split("],")
            .map(|p| {
                if p.ends_with(']') {
                    p.to_string()
                } else {
                    format!("{p}]")
                }
            })
            .map(|p| p.parse::<RankBounds>().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?
    };
    Ok(RuleApp {
        rule,
        cite: cite.to_string(),
        ins,
        arg: if arg == "-" { String::new() } else { arg.to_string() },
        out: out.parse().map_err(|e: RankError| e.to_string())?,
    })
}

impl fmt::Display for RuleApp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RULE {} cite=\"{}\" in=", self.rule, self.cite.replace('"', "'"))?;
        if self.ins.is_empty() {
            write!(f, "-")?;
        }
        for (i, b) in self.ins.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        let arg = if self.arg.is_empty() { "-" } else { &self.arg };
        write!(f, " arg={arg} out={}", self.out)
    }
}

impl fmt::Display for RankCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.nodes {
            let pad = "  ".repeat(n.depth);
            writeln!(f, "{pad}NODE {} bounds={}", n.label, n.bounds)?;
            for r in &n.rules {
                writeln!(f, "{pad}  {r}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn app(rule: Rule, ins: Vec<RankBounds>, arg: &str) -> RuleApp {
        let out = rule.eval(&ins, arg).unwrap();
        RuleApp {
            rule,
            cite: rule.cite().into(),
            ins,
            arg: arg.into(),
            out,
        }
    }

    fn sample() -> RankCertificate {
        let leaf = RankBounds::finite(1, 1);
        RankCertificate {
            nodes: vec![
                CertNode {
                    label: "prod(frechet, frechet)".into(),
                    depth: 0,
                    bounds: RankBounds::finite(2, 2),
                    rules: vec![
                        app(Rule::RKat, vec![], "n=2"),
                        app(Rule::RFubFr, vec![leaf.clone(), leaf.clone()], "J=cofin{}"),
                    ],
                },
                CertNode {
                    label: "frechet".into(),
                    depth: 1,
                    bounds: leaf.clone(),
                    rules: vec![app(Rule::RKat, vec![], "n=1")],
                },
            ],
        }
    }

    #[test]
    fn text_round_trip_and_replay() {
        let c = sample();
        let text = c.to_string();
        let back = RankCertificate::parse(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.replay().unwrap(), RankBounds::finite(2, 2));
    }

    #[test]
    fn tampered_certificates_fail() {
        let text = sample().to_string().replace("out=[0,2]", "out=[0,1]");
        assert!(RankCertificate::parse(&text).unwrap().replay().is_err());
        let mut c = sample();
        c.nodes[0].bounds = RankBounds::finite(2, 3);
        assert!(c.replay().is_err());
        let mut c = sample();
        c.nodes[0].rules[1].ins[1] = RankBounds::finite(0, 1);
        c.nodes[0].rules[1].out = RankBounds::finite(0, 2);
        assert!(c.replay().is_err());
    }
}
