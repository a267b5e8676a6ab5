//! SMILES reader for the organic subset.
//!
//! Supported: B, C, N, O, P, S, F, Cl, Br, I (aromatic lowercase for
//! b/c/n/o/p/s), bracket atoms with charge and explicit hydrogen count,
//! branches, ring closures (`1`..`9` and `%nn`), and the bond symbols
//! `- = # :`. Stereochemistry, isotopes and multi-fragment input are
//! rejected with an error naming the feature.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Element {
    B,
    C,
    N,
    O,
    P,
    S,
    F,
    Cl,
    Br,
    I,
}

impl Element {
    pub fn symbol(self) -> &'static str {
        match self {
            Element::B => "B",
            Element::C => "C",
            Element::N => "N",
            Element::O => "O",
            Element::P => "P",
            Element::S => "S",
            Element::F => "F",
            Element::Cl => "Cl",
            Element::Br => "Br",
            Element::I => "I",
        }
    }

    /// Default valence used to infer the implicit hydrogen count.
    pub fn standard_valence(self) -> u8 {
        match self {
            Element::B => 3,
            Element::C => 4,
            Element::N => 3,
            Element::O => 2,
            Element::P => 3,
            Element::S => 2,
            Element::F | Element::Cl | Element::Br | Element::I => 1,
        }
    }

    fn from_symbol(sym: &str) -> Option<Element> {
        Some(match sym {
            "B" => Element::B,
            "C" => Element::C,
            "N" => Element::N,
            "O" => Element::O,
            "P" => Element::P,
            "S" => Element::S,
            "F" => Element::F,
            "Cl" => Element::Cl,
            "Br" => Element::Br,
            "I" => Element::I,
            _ => return None,
        })
    }

    /// Numeric code used by the fingerprint hash; stable across releases.
    pub fn code(self) -> u64 {
        match self {
            Element::B => 5,
            Element::C => 6,
            Element::N => 7,
            Element::O => 8,
            Element::P => 15,
            Element::S => 16,
            Element::F => 9,
            Element::Cl => 17,
            Element::Br => 35,
            Element::I => 53,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BondOrder {
    Single,
    Double,
    Triple,
    Aromatic,
}

impl BondOrder {
    /// Numeric code used by the fingerprint hash; stable across releases.
    pub fn code(self) -> u64 {
        match self {
            BondOrder::Single => 1,
            BondOrder::Double => 2,
            BondOrder::Triple => 3,
            BondOrder::Aromatic => 4,
        }
    }

    /// Contribution to the valence sum when inferring hydrogen counts.
    pub fn valence_units(self) -> f64 {
        match self {
            BondOrder::Single => 1.0,
            BondOrder::Double => 2.0,
            BondOrder::Triple => 3.0,
            BondOrder::Aromatic => 1.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Atom {
    pub element: Element,
    pub charge: i8,
    pub aromatic: bool,
    /// Hydrogen count pinned by a bracket atom; `None` means inferred from
    /// standard valence.
    pub explicit_h: Option<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: BondOrder,
}

/// Connected molecular graph with implicit hydrogens.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MolecularGraph {
    pub atoms: Vec<Atom>,
    pub bonds: Vec<Bond>,
}

impl MolecularGraph {
    /// Per-atom neighbor list as `(neighbor index, bond order)` pairs.
    pub fn neighbor_lists(&self) -> Vec<Vec<(usize, BondOrder)>> {
        let mut adj = vec![Vec::new(); self.atoms.len()];
        for bond in &self.bonds {
            adj[bond.a].push((bond.b, bond.order));
            adj[bond.b].push((bond.a, bond.order));
        }
        adj
    }

    /// Attached hydrogen count: the bracket-pinned value when present,
    /// otherwise standard valence minus the explicit bond-order sum,
    /// clamped at zero.
    pub fn attached_h(&self, idx: usize) -> u8 {
        if let Some(h) = self.atoms[idx].explicit_h {
            return h;
        }
        let mut order_sum = 0.0;
        for bond in &self.bonds {
            if bond.a == idx || bond.b == idx {
                order_sum += bond.order.valence_units();
            }
        }
        let free = f64::from(self.atoms[idx].element.standard_valence()) - order_sum;
        if free <= 0.0 {
            0
        } else {
            free.floor() as u8
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmilesError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unsupported SMILES feature at offset {offset}: {feature}")]
    Unsupported { offset: usize, feature: String },
    #[error("molecule is disconnected")]
    Disconnected,
}

fn syntax(offset: usize, message: impl Into<String>) -> SmilesError {
    SmilesError::Syntax {
        offset,
        message: message.into(),
    }
}

fn unsupported(offset: usize, feature: impl Into<String>) -> SmilesError {
    SmilesError::Unsupported {
        offset,
        feature: feature.into(),
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    /// Attachment point for the next atom; `None` before the first atom.
    prev: Option<usize>,
    branch_stack: Vec<usize>,
    /// Bond symbol waiting for its right-hand atom or ring digit.
    pending: Option<(BondOrder, usize)>,
    /// Ring number -> (atom, bond symbol at the opening side, offset).
    open_rings: Vec<(u32, usize, Option<BondOrder>, usize)>,
}

pub fn parse_smiles(text: &str) -> Result<MolecularGraph, SmilesError> {
    if !text.is_ascii() {
        let offset = text
            .char_indices()
            .find(|(_, c)| !c.is_ascii())
            .map(|(i, _)| i)
            .unwrap_or(0);
        return Err(syntax(offset, "non-ASCII character"));
    }
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
        atoms: Vec::new(),
        bonds: Vec::new(),
        prev: None,
        branch_stack: Vec::new(),
        pending: None,
        open_rings: Vec::new(),
    };
    p.run()?;
    p.finish()
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn run(&mut self) -> Result<(), SmilesError> {
        if self.bytes.is_empty() {
            return Err(syntax(0, "empty SMILES"));
        }
        while let Some(c) = self.peek() {
            let start = self.pos;
            match c {
                b'[' => {
                    self.pos += 1;
                    let atom = self.parse_bracket_atom(start)?;
                    self.add_atom(atom, start)?;
                }
                b'B' | b'C' | b'N' | b'O' | b'P' | b'S' | b'F' | b'I' => {
                    self.pos += 1;
                    let sym = self.maybe_two_letter(c);
                    let element = Element::from_symbol(&sym)
                        .ok_or_else(|| syntax(start, format!("unknown element '{sym}'")))?;
                    self.add_atom(
                        Atom {
                            element,
                            charge: 0,
                            aromatic: false,
                            explicit_h: None,
                        },
                        start,
                    )?;
                }
                b'b' | b'c' | b'n' | b'o' | b'p' | b's' => {
                    self.pos += 1;
                    let sym = (c as char).to_ascii_uppercase().to_string();
                    let element = Element::from_symbol(&sym).unwrap();
                    self.add_atom(
                        Atom {
                            element,
                            charge: 0,
                            aromatic: true,
                            explicit_h: None,
                        },
                        start,
                    )?;
                }
                b'-' => {
                    self.pos += 1;
                    self.set_pending(BondOrder::Single, start)?;
                }
                b'=' => {
                    self.pos += 1;
                    self.set_pending(BondOrder::Double, start)?;
                }
                b'#' => {
                    self.pos += 1;
                    self.set_pending(BondOrder::Triple, start)?;
                }
                b':' => {
                    self.pos += 1;
                    self.set_pending(BondOrder::Aromatic, start)?;
                }
                b'(' => {
                    self.pos += 1;
                    let prev = self
                        .prev
                        .ok_or_else(|| syntax(start, "branch before any atom"))?;
                    self.branch_stack.push(prev);
                }
                b')' => {
                    self.pos += 1;
                    if self.pending.is_some() {
                        return Err(syntax(start, "dangling bond symbol before ')'"));
                    }
                    let from = self
                        .branch_stack
                        .pop()
                        .ok_or_else(|| syntax(start, "unmatched ')'"))?;
                    self.prev = Some(from);
                }
                b'0'..=b'9' => {
                    self.pos += 1;
                    self.ring_closure(u32::from(c - b'0'), start)?;
                }
                b'%' => {
                    self.pos += 1;
                    let d1 = self.bump();
                    let d2 = self.bump();
                    match (d1, d2) {
                        (Some(a), Some(b)) if a.is_ascii_digit() && b.is_ascii_digit() => {
                            let num = u32::from(a - b'0') * 10 + u32::from(b - b'0');
                            self.ring_closure(num, start)?;
                        }
                        _ => return Err(syntax(start, "'%' must be followed by two digits")),
                    }
                }
                b'.' => return Err(unsupported(start, "multi-fragment input ('.')")),
                b'/' | b'\\' => {
                    return Err(unsupported(start, "stereochemistry (directional bond)"))
                }
                b'@' => return Err(unsupported(start, "stereochemistry ('@')")),
                b'*' => return Err(unsupported(start, "wildcard atom ('*')")),
                _ => {
                    return Err(syntax(start, format!("unexpected character '{}'", c as char)));
                }
            }
        }
        Ok(())
    }

    /// Consume a following lowercase letter when it completes Cl or Br.
    fn maybe_two_letter(&mut self, first: u8) -> String {
        if first == b'C' && self.peek() == Some(b'l') {
            self.pos += 1;
            return "Cl".to_string();
        }
        if first == b'B' && self.peek() == Some(b'r') {
            self.pos += 1;
            return "Br".to_string();
        }
        (first as char).to_string()
    }

    fn parse_bracket_atom(&mut self, open: usize) -> Result<Atom, SmilesError> {
        if matches!(self.peek(), Some(b'0'..=b'9')) {
            return Err(unsupported(self.pos, "isotope"));
        }
        let sym_start = self.pos;
        let first = self
            .bump()
            .ok_or_else(|| syntax(open, "unterminated bracket atom"))?;
        let (sym, aromatic) = match first {
            b'b' | b'c' | b'n' | b'o' | b'p' | b's' => {
                ((first as char).to_ascii_uppercase().to_string(), true)
            }
            b'A'..=b'Z' => {
                // Element symbols are one uppercase plus an optional
                // lowercase letter; unknown symbols error out below.
                let mut sym = (first as char).to_string();
                if let Some(next) = self.peek() {
                    if next.is_ascii_lowercase() {
                        sym.push(next as char);
                        self.pos += 1;
                    }
                }
                (sym, false)
            }
            b'@' => return Err(unsupported(self.pos - 1, "stereochemistry ('@')")),
            _ => {
                return Err(syntax(
                    sym_start,
                    format!("unexpected character '{}' in bracket atom", first as char),
                ))
            }
        };
        let element = Element::from_symbol(&sym)
            .ok_or_else(|| unsupported(sym_start, format!("element '{sym}'")))?;

        let mut explicit_h: u8 = 0;
        let mut charge: i32 = 0;
        loop {
            match self.peek() {
                Some(b']') => {
                    self.pos += 1;
                    break;
                }
                Some(b'H') => {
                    self.pos += 1;
                    explicit_h = 1;
                    if let Some(d @ b'0'..=b'9') = self.peek() {
                        self.pos += 1;
                        explicit_h = d - b'0';
                    }
                }
                Some(b'+') => {
                    self.pos += 1;
                    charge += 1;
                    if let Some(d @ b'0'..=b'9') = self.peek() {
                        self.pos += 1;
                        charge = i32::from(d - b'0');
                    }
                }
                Some(b'-') => {
                    self.pos += 1;
                    charge -= 1;
                    if let Some(d @ b'0'..=b'9') = self.peek() {
                        self.pos += 1;
                        charge = -i32::from(d - b'0');
                    }
                }
                Some(b'@') => return Err(unsupported(self.pos, "stereochemistry ('@')")),
                Some(c) => {
                    return Err(syntax(
                        self.pos,
                        format!("unexpected character '{}' in bracket atom", c as char),
                    ))
                }
                None => return Err(syntax(open, "unterminated bracket atom")),
            }
        }
        Ok(Atom {
            element,
            charge: charge
                .try_into()
                .map_err(|_| syntax(open, "charge out of range"))?,
            aromatic,
            explicit_h: Some(explicit_h),
        })
    }

    fn set_pending(&mut self, order: BondOrder, offset: usize) -> Result<(), SmilesError> {
        if self.prev.is_none() {
            return Err(syntax(offset, "bond symbol before any atom"));
        }
        if self.pending.is_some() {
            return Err(syntax(offset, "two consecutive bond symbols"));
        }
        self.pending = Some((order, offset));
        Ok(())
    }

    fn add_atom(&mut self, atom: Atom, offset: usize) -> Result<(), SmilesError> {
        let idx = self.atoms.len();
        self.atoms.push(atom);
        if let Some(prev) = self.prev {
            let order = match self.pending.take() {
                Some((order, _)) => order,
                None => self.default_order(prev, idx),
            };
            self.push_bond(prev, idx, order, offset)?;
        } else if let Some((_, at)) = self.pending {
            return Err(syntax(at, "bond symbol before any atom"));
        }
        self.prev = Some(idx);
        Ok(())
    }

    /// Implicit bond order: aromatic between two aromatic atoms, else single.
    fn default_order(&self, a: usize, b: usize) -> BondOrder {
        if self.atoms[a].aromatic && self.atoms[b].aromatic {
            BondOrder::Aromatic
        } else {
            BondOrder::Single
        }
    }

    fn push_bond(
        &mut self,
        a: usize,
        b: usize,
        order: BondOrder,
        offset: usize,
    ) -> Result<(), SmilesError> {
        if a == b {
            return Err(syntax(offset, "ring bond joins an atom to itself"));
        }
        if self
            .bonds
            .iter()
            .any(|x| (x.a == a && x.b == b) || (x.a == b && x.b == a))
        {
            return Err(syntax(offset, "duplicate bond between the same atoms"));
        }
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        self.bonds.push(Bond { a, b, order });
        Ok(())
    }

    fn ring_closure(&mut self, num: u32, offset: usize) -> Result<(), SmilesError> {
        let atom = self
            .prev
            .ok_or_else(|| syntax(offset, "ring closure before any atom"))?;
        let pending = self.pending.take().map(|(order, _)| order);
        if let Some(pos) = self.open_rings.iter().position(|(n, _, _, _)| *n == num) {
            let (_, other, opening, _) = self.open_rings.remove(pos);
            let order = match (opening, pending) {
                (Some(o1), Some(o2)) if o1 != o2 => {
                    return Err(syntax(offset, "conflicting bond symbols on ring closure"));
                }
                (Some(o), _) | (_, Some(o)) => o,
                (None, None) => self.default_order(other, atom),
            };
            self.push_bond(other, atom, order, offset)?;
        } else {
            self.open_rings.push((num, atom, pending, offset));
        }
        Ok(())
    }

    fn finish(mut self) -> Result<MolecularGraph, SmilesError> {
        if let Some((_, at)) = self.pending {
            return Err(syntax(at, "dangling bond symbol at end of input"));
        }
        if let Some((num, _, _, at)) = self.open_rings.first() {
            return Err(syntax(*at, format!("unclosed ring bond {num}")));
        }
        if !self.branch_stack.is_empty() {
            return Err(syntax(self.bytes.len(), "unclosed '('"));
        }
        let graph = MolecularGraph {
            atoms: std::mem::take(&mut self.atoms),
            bonds: std::mem::take(&mut self.bonds),
        };
        if !is_connected(&graph) {
            return Err(SmilesError::Disconnected);
        }
        Ok(graph)
    }
}

fn is_connected(graph: &MolecularGraph) -> bool {
    let n = graph.atoms.len();
    if n <= 1 {
        return true;
    }
    let adj = graph.neighbor_lists();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = stack.pop() {
        for &(u, _) in &adj[v] {
            if !seen[u] {
                seen[u] = true;
                count += 1;
                stack.push(u);
            }
        }
    }
    count == n
}
