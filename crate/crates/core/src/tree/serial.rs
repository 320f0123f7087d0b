use super::{LabeledTree, NodeId, TreeBuilder, TreeError};

/// Writes `t` in canonical form: `label | "(" tree "," tree ")"`, with the
/// child holding the smaller minimum label first.
pub fn canonical_serialize(t: &LabeledTree) -> String {
    canonical_subtree(t, t.top())
}

/// Canonical text of the subtree hanging below edge `root`.
pub fn canonical_subtree(t: &LabeledTree, root: NodeId) -> String {
    let min = t.min_labels();
    let mut out = String::with_capacity(t.node_count() * 4);
    enum Tok {
        Node(NodeId),
        Comma,
        Close,
    }
    let mut stack = vec![Tok::Node(root)];
    while let Some(tok) = stack.pop() {
        match tok {
            Tok::Comma => out.push(','),
            Tok::Close => out.push(')'),
            Tok::Node(id) => match t.canonical_children(id, &min) {
                None => {
                    use std::fmt::Write;
                    let _ = write!(out, "{}", t.label(id).expect("leaf"));
                }
                Some([a, b]) => {
                    out.push('(');
                    stack.push(Tok::Close);
                    stack.push(Tok::Node(b));
                    stack.push(Tok::Comma);
                    stack.push(Tok::Node(a));
                }
            },
        }
    }
    out
}

/// Parses the tree text format. Whitespace is ignored anywhere.
pub fn parse_tree(text: &str) -> Result<LabeledTree, TreeError> {
    struct Frame {
        pos: usize,
        children: Vec<NodeId>,
    }
    let bytes = text.as_bytes();
    let mut b = TreeBuilder::with_capacity(text.len() / 2 + 1);
    let mut frames: Vec<Frame> = Vec::new();
    let mut root: Option<NodeId> = None;
    // True when the grammar expects a subtree next.
    let mut want_tree = true;
    let syntax = |pos: usize, msg: &str| TreeError::Syntax { pos, msg: msg.to_string() };

    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if root.is_some() {
            return Err(syntax(i, "trailing input after tree"));
        }
        match c {
            b'(' => {
                if !want_tree {
                    return Err(syntax(i, "expected ',' or ')'"));
                }
                frames.push(Frame { pos: i, children: Vec::with_capacity(2) });
                i += 1;
            }
            b'0'..=b'9' => {
                if !want_tree {
                    return Err(syntax(i, "expected ',' or ')'"));
                }
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let label: u32 = text[start..i]
                    .parse()
                    .map_err(|_| syntax(start, "label out of range"))?;
                let leaf = b.leaf(label);
                match frames.last_mut() {
                    Some(f) => f.children.push(leaf),
                    None => root = Some(leaf),
                }
                want_tree = false;
            }
            b',' => {
                if want_tree || frames.is_empty() {
                    return Err(syntax(i, "unexpected ','"));
                }
                want_tree = true;
                i += 1;
            }
            b')' => {
                let frame = frames.pop().ok_or_else(|| syntax(i, "unbalanced ')'"))?;
                if want_tree && !frame.children.is_empty() {
                    return Err(syntax(i, "expected a subtree before ')'"));
                }
                if frame.children.len() != 2 {
                    return Err(TreeError::NonBinary { pos: frame.pos, arity: frame.children.len() });
                }
                let node = b.join(frame.children[0], frame.children[1]);
                match frames.last_mut() {
                    Some(f) => f.children.push(node),
                    None => root = Some(node),
                }
                want_tree = false;
                i += 1;
            }
            _ => return Err(syntax(i, "unexpected character")),
        }
    }
    if let Some(f) = frames.last() {
        return Err(syntax(f.pos, "unclosed '('"));
    }
    let top = root.ok_or_else(|| syntax(bytes.len(), "empty input"))?;
    b.finish(top)
}
