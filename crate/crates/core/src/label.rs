//! Structured row and column labels.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

/// A row or column name: an integer atom or a tuple of labels.
///
/// Pairs are two-element tuples. The derived order compares atoms before
/// tuples and tuples lexicographically.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Atom(i64),
    Tuple(Arc<[Label]>),
}

impl Label {
    pub fn atom(value: i64) -> Self {
        Label::Atom(value)
    }

    pub fn pair(first: Label, second: Label) -> Self {
        Label::Tuple(Arc::from([first, second]))
    }

    pub fn tuple<I: IntoIterator<Item = Label>>(items: I) -> Self {
        Label::Tuple(items.into_iter().collect::<Vec<_>>().into())
    }

    pub fn as_atom(&self) -> Option<i64> {
        match self {
            Label::Atom(v) => Some(*v),
            Label::Tuple(_) => None,
        }
    }

    pub fn items(&self) -> Option<&[Label]> {
        match self {
            Label::Atom(_) => None,
            Label::Tuple(items) => Some(items),
        }
    }

    /// Component `index` of a tuple label.
    pub fn get(&self, index: usize) -> Option<&Label> {
        self.items().and_then(|items| items.get(index))
    }
}

impl From<i64> for Label {
    fn from(value: i64) -> Self {
        Label::Atom(value)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Atom(v) => write!(f, "{v}"),
            Label::Tuple(items) => {
                f.write_str("(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
        }
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    #[test]
    fn display_is_nested_sexpr() {
        let l = Label::pair(Label::atom(1), Label::pair(Label::atom(2), Label::atom(3)));
        assert_eq!(format!("{l}"), "(1 (2 3))");
    }

    #[test]
    fn order_is_structural() {
        let a = Label::pair(1.into(), 2.into());
        let b = Label::pair(1.into(), 3.into());
        assert!(a < b);
        assert!(Label::atom(99) < Label::tuple([]));
        assert_eq!(a, Label::tuple([1.into(), 2.into()]));
    }
}
