//! Integer arithmetic expressions with a canonical left-to-right reduction.
//!
//! An expression is a left-nested chain of `k` binary operations over
//! integer operands. Its canonical solution reduces one innermost operation
//! per step, which makes every step exactly checkable.

use once_cell::sync::Lazy;
use regex::Regex;

use super::SynthError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
}

impl Op {
    pub fn apply(self, a: i64, b: i64) -> i64 {
        match self {
            Op::Add => a + b,
            Op::Sub => a - b,
            Op::Mul => a * b,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Op::Add => '+',
            Op::Sub => '-',
            Op::Mul => '*',
        }
    }

    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            '+' => Some(Op::Add),
            '-' => Some(Op::Sub),
            '*' => Some(Op::Mul),
            _ => None,
        }
    }
}

/// A left-nested chain: `(((o0 ⊕1 o1) ⊕2 o2) … ⊕k ok)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expression {
    operands: Vec<i64>,
    ops: Vec<Op>,
}

/// One reduction claim `a ⊕ b = r`, as stated by a step text.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Claim {
    pub left: i64,
    pub op: Op,
    pub right: i64,
    pub result: i64,
}

static CLAIM_RE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"^Compute\s+(-?\d+)\s*([+*-])\s*(-?\d+)\s*=\s*(-?\d+)").unwrap());
static ANSWER_RE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"[Tt]he solution is\s+(-?\d+)\s*\.?\s*$").unwrap());
static QUESTION_RE: Lazy<Regex> =
    Lazy::new(|| Regex::new(r"^Evaluate the expression\s+(.+?)\s*\.?\s*$").unwrap());

impl Expression {
    pub fn new(operands: Vec<i64>, ops: Vec<Op>) -> Result<Self, SynthError> {
        if ops.is_empty() || operands.len() != ops.len() + 1 {
            return Err(SynthError::BadArity {
                operands: operands.len(),
                ops: ops.len(),
            });
        }
        Ok(Self { operands, ops })
    }

    pub fn op_count(&self) -> usize {
        self.ops.len()
    }

    pub fn operands(&self) -> &[i64] {
        &self.operands
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// Exact value of the whole expression.
    pub fn target(&self) -> i64 {
        self.prefix_states()[self.ops.len()]
    }

    /// `states[i]` is the accumulated value after the first `i` reductions;
    /// `states[0]` is the leading operand.
    pub fn prefix_states(&self) -> Vec<i64> {
        let mut states = Vec::with_capacity(self.ops.len() + 1);
        let mut acc = self.operands[0];
        states.push(acc);
        for (op, &operand) in self.ops.iter().zip(&self.operands[1..]) {
            acc = op.apply(acc, operand);
            states.push(acc);
        }
        states
    }

    /// The `i`-th canonical reduction claim (0-based).
    pub fn claim(&self, i: usize) -> Claim {
        let states = self.prefix_states();
        Claim {
            left: states[i],
            op: self.ops[i],
            right: self.operands[i + 1],
            result: states[i + 1],
        }
    }

    pub fn render(&self) -> String {
        self.render_from(self.operands[0], 0)
    }

    /// Renders the expression that remains once the accumulated value is
    /// `value` and the first `consumed` operations have been folded away.
    pub fn render_from(&self, value: i64, consumed: usize) -> String {
        let mut out = render_atom(value);
        for (j, (op, &operand)) in self.ops[consumed..]
            .iter()
            .zip(&self.operands[consumed + 1..])
            .enumerate()
        {
            if j > 0 {
                out = format!("({out})");
            }
            out = format!("{out} {} {}", op.symbol(), render_atom(operand));
        }
        out
    }

    pub fn question(&self) -> String {
        format!("Evaluate the expression {}.", self.render())
    }

    pub fn from_question(question: &str) -> Result<Self, SynthError> {
        let caps = QUESTION_RE
            .captures(question.trim())
            .ok_or_else(|| SynthError::Parse(format!("not an expression question: {question:?}")))?;
        Self::parse(&caps[1])
    }

    /// Parses a rendered expression back into its left-nested chain.
    pub fn parse(text: &str) -> Result<Self, SynthError> {
        let tokens = tokenize(text)?;
        let mut pos = 0;
        let node = parse_chain(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(SynthError::Parse(format!(
                "trailing tokens after expression in {text:?}"
            )));
        }
        let mut operands = Vec::new();
        let mut ops = Vec::new();
        flatten(&node, &mut operands, &mut ops)?;
        Expression::new(operands, ops)
    }

    /// Text of the `i`-th canonical step (0-based). The final step states
    /// the solution instead of restating a remaining expression.
    pub fn step_text(&self, i: usize) -> String {
        let claim = self.claim(i);
        render_step_text(self, i, claim)
    }

    /// All canonical step texts in order.
    pub fn canonical_step_texts(&self) -> Vec<String> {
        (0..self.op_count()).map(|i| self.step_text(i)).collect()
    }
}

/// Renders a step text for an arbitrary (possibly corrupted) claim at
/// position `i`, keeping the remaining-expression tail consistent with the
/// claimed result.
pub fn render_step_text(expr: &Expression, i: usize, claim: Claim) -> String {
    if i + 1 == expr.op_count() {
        format!(
            "Compute {} {} {} = {}. The solution is {}.",
            claim.left,
            claim.op.symbol(),
            claim.right,
            claim.result,
            claim.result
        )
    } else {
        format!(
            "Compute {} {} {} = {}; the expression becomes {}.",
            claim.left,
            claim.op.symbol(),
            claim.right,
            claim.result,
            expr.render_from(claim.result, i + 1)
        )
    }
}

/// Extracts the reduction claim stated by a step text, if any.
pub fn parse_claim(step_text: &str) -> Option<Claim> {
    let caps = CLAIM_RE.captures(step_text)?;
    Some(Claim {
        left: caps[1].parse().ok()?,
        op: Op::from_symbol(caps[2].chars().next()?)?,
        right: caps[3].parse().ok()?,
        result: caps[4].parse().ok()?,
    })
}

/// Extracts the final answer stated by a terminal step text, if any.
pub fn parse_answer(step_text: &str) -> Option<i64> {
    ANSWER_RE
        .captures(step_text)
        .and_then(|caps| caps[1].parse().ok())
}

fn render_atom(value: i64) -> String {
    if value < 0 {
        format!("({value})")
    } else {
        value.to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Token {
    Num(i64),
    Op(Op),
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<Token>, SynthError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            ' ' | '\t' => {
                chars.next();
            }
            '(' => {
                chars.next();
                tokens.push(Token::Open);
            }
            ')' => {
                chars.next();
                tokens.push(Token::Close);
            }
            '0'..='9' => {
                let mut n: i64 = 0;
                while let Some(&d) = chars.peek() {
                    if let Some(v) = d.to_digit(10) {
                        n = n * 10 + i64::from(v);
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Token::Num(n));
            }
            '-' => {
                chars.next();
                // Unary minus when a number follows and the previous token
                // cannot end an operand.
                let unary = matches!(
                    tokens.last(),
                    None | Some(Token::Op(_)) | Some(Token::Open)
                );
                if unary {
                    match chars.peek() {
                        Some(d) if d.is_ascii_digit() => {
                            let mut n: i64 = 0;
                            while let Some(&d) = chars.peek() {
                                if let Some(v) = d.to_digit(10) {
                                    n = n * 10 + i64::from(v);
                                    chars.next();
                                } else {
                                    break;
                                }
                            }
                            tokens.push(Token::Num(-n));
                        }
                        _ => {
                            return Err(SynthError::Parse(format!(
                                "dangling unary minus in {text:?}"
                            )))
                        }
                    }
                } else {
                    tokens.push(Token::Op(Op::Sub));
                }
            }
            '+' | '*' => {
                chars.next();
                tokens.push(Token::Op(Op::from_symbol(c).unwrap()));
            }
            other => {
                return Err(SynthError::Parse(format!(
                    "unexpected character {other:?} in {text:?}"
                )))
            }
        }
    }
    Ok(tokens)
}

#[derive(Debug)]
enum Node {
    Num(i64),
    Bin(Box<Node>, Op, Box<Node>),
}

fn parse_chain(tokens: &[Token], pos: &mut usize) -> Result<Node, SynthError> {
    let mut node = parse_primary(tokens, pos)?;
    while let Some(Token::Op(op)) = tokens.get(*pos) {
        *pos += 1;
        let rhs = parse_primary(tokens, pos)?;
        node = Node::Bin(Box::new(node), *op, Box::new(rhs));
    }
    Ok(node)
}

fn parse_primary(tokens: &[Token], pos: &mut usize) -> Result<Node, SynthError> {
    match tokens.get(*pos) {
        Some(Token::Num(n)) => {
            *pos += 1;
            Ok(Node::Num(*n))
        }
        Some(Token::Open) => {
            *pos += 1;
            let node = parse_chain(tokens, pos)?;
            match tokens.get(*pos) {
                Some(Token::Close) => {
                    *pos += 1;
                    Ok(node)
                }
                _ => Err(SynthError::Parse("unclosed parenthesis".into())),
            }
        }
        other => Err(SynthError::Parse(format!("unexpected token {other:?}"))),
    }
}

/// Collapses an AST into the flat left-nested chain, rejecting any other
/// shape.
fn flatten(node: &Node, operands: &mut Vec<i64>, ops: &mut Vec<Op>) -> Result<(), SynthError> {
    match node {
        Node::Num(n) => {
            operands.push(*n);
            Ok(())
        }
        Node::Bin(left, op, right) => {
            flatten(left, operands, ops)?;
            match **right {
                Node::Num(n) => {
                    ops.push(*op);
                    operands.push(n);
                    Ok(())
                }
                _ => Err(SynthError::Parse(
                    "expression is not a left-nested chain".into(),
                )),
            }
        }
    }
}
