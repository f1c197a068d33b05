//! Finite linearly ordered sets and the order constructions built on them:
//! duals, one-point bottom extensions, characteristic subsets, isotone maps
//! and Dedekind cuts.
//!
//! Labels are opaque strings; the order of a set is purely positional and
//! never derived from the label text.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

pub type Label = String;

/// A finite linearly ordered set: labels listed in strictly ascending order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FiniteOrderedSet {
    elements: Vec<Label>,
}

impl FiniteOrderedSet {
    pub fn new(elements: Vec<Label>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for e in &elements {
            if !seen.insert(e.clone()) {
                return Err(Error::Duplicate(format!("label {e:?} appears twice")));
            }
        }
        Ok(FiniteOrderedSet { elements })
    }

    pub fn from_strs(elements: &[&str]) -> Self {
        FiniteOrderedSet::new(elements.iter().map(|s| s.to_string()).collect())
            .expect("distinct labels")
    }

    pub fn elements(&self) -> &[Label] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }

    /// Compare two members by position.
    pub fn cmp_labels(&self, a: &str, b: &str) -> Result<std::cmp::Ordering> {
        let pa = self
            .position(a)
            .ok_or_else(|| Error::UnknownLabel(a.to_string()))?;
        let pb = self
            .position(b)
            .ok_or_else(|| Error::UnknownLabel(b.to_string()))?;
        Ok(pa.cmp(&pb))
    }

    /// The dual order: the same labels with all comparisons reversed.
    /// Involutive: `dual(dual(L)) = L`.
    pub fn dual(&self) -> FiniteOrderedSet {
        let mut elements = self.elements.clone();
        elements.reverse();
        FiniteOrderedSet { elements }
    }
}

/// A finite linearly ordered set with a distinguished least element at
/// position 0. Every other element is strictly above the bottom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BottomedOrderedSet {
    base: FiniteOrderedSet,
}

impl BottomedOrderedSet {
    /// Builds the one-point bottom extension of `base` by `bottom_label`.
    /// The new element sits strictly below everything; the relative order of
    /// the old elements is unchanged.
    pub fn one_point_extension(base: &FiniteOrderedSet, bottom_label: &str) -> Result<Self> {
        if base.contains(bottom_label) {
            return Err(Error::LabelCollision(format!(
                "bottom label {bottom_label:?} already occurs in the base set"
            )));
        }
        let mut elements = Vec::with_capacity(base.len() + 1);
        elements.push(bottom_label.to_string());
        elements.extend(base.elements().iter().cloned());
        Ok(BottomedOrderedSet {
            base: FiniteOrderedSet { elements },
        })
    }

    /// Reads an already-bottomed list: the first label is the least element.
    pub fn from_elements(elements: Vec<Label>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Empty("a bottomed set needs a least element".into()));
        }
        Ok(BottomedOrderedSet {
            base: FiniteOrderedSet::new(elements)?,
        })
    }

    pub fn from_strs(elements: &[&str]) -> Self {
        BottomedOrderedSet::from_elements(elements.iter().map(|s| s.to_string()).collect())
            .expect("valid bottomed set")
    }

    pub fn bottom(&self) -> &Label {
        &self.base.elements()[0]
    }

    /// All elements except the bottom, ascending.
    pub fn stars(&self) -> &[Label] {
        &self.base.elements()[1..]
    }

    pub fn elements(&self) -> &[Label] {
        self.base.elements()
    }

    pub fn as_ordered_set(&self) -> &FiniteOrderedSet {
        &self.base
    }

    pub fn contains(&self, label: &str) -> bool {
        self.base.contains(label)
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.base.position(label)
    }

    pub fn cmp_labels(&self, a: &str, b: &str) -> Result<std::cmp::Ordering> {
        self.base.cmp_labels(a, b)
    }
}

/// Is `subset` characteristic in `s`: it contains the bottom and reaches
/// arbitrarily low among the positive elements (for every `x` above the
/// bottom some non-bottom member lies at or below `x`).
pub fn is_characteristic(subset: &BTreeSet<Label>, s: &BottomedOrderedSet) -> Result<bool> {
    for t in subset {
        if !s.contains(t) {
            return Err(Error::UnknownLabel(format!(
                "{t:?} is not a member of the ambient set"
            )));
        }
    }
    if !subset.contains(s.bottom()) {
        return Ok(false);
    }
    let star_positions: Vec<usize> = subset
        .iter()
        .filter(|t| *t != s.bottom())
        .map(|t| s.position(t).unwrap())
        .collect();
    for x in s.stars() {
        let px = s.position(x).unwrap();
        if !star_positions.iter().any(|pt| *pt <= px) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The Dedekind completion of a finite nonempty ordered set, as the set of
/// all cuts ordered by inclusion, together with the canonical embedding
/// sending `a` to the cut of everything at or below `a`. For finite sets the
/// completion is order-isomorphic to the set itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DedekindCompletion {
    /// Cuts in ascending (inclusion) order; each cut lists its members.
    pub cuts: Vec<Vec<Label>>,
    /// `embedding[i]` is the index of the cut that element `i` maps to.
    pub embedding: Vec<usize>,
}

impl DedekindCompletion {
    /// The completion as an ordered set of synthetic labels `{a,b,...}`.
    pub fn as_ordered_set(&self) -> FiniteOrderedSet {
        let elements = self.cuts.iter().map(|c| cut_label(c)).collect();
        FiniteOrderedSet { elements }
    }
}

fn cut_label(cut: &[Label]) -> Label {
    format!("{{{}}}", cut.join(","))
}

pub fn dedekind_completion(l: &FiniteOrderedSet) -> Result<DedekindCompletion> {
    if l.is_empty() {
        return Err(Error::Empty("cannot complete the empty ordered set".into()));
    }
    // Every cut of a finite set contains its supremum, so the cuts are
    // exactly the principal down-sets.
    let n = l.len();
    let cuts: Vec<Vec<Label>> = (0..n).map(|i| l.elements()[..=i].to_vec()).collect();
    let embedding = (0..n).collect();
    Ok(DedekindCompletion { cuts, embedding })
}

fn require_total(
    f: &BTreeMap<Label, Label>,
    l: &FiniteOrderedSet,
    r: &FiniteOrderedSet,
) -> Result<()> {
    for x in l.elements() {
        match f.get(x) {
            None => return Err(Error::NotTotal(x.clone())),
            Some(y) if !r.contains(y) => {
                return Err(Error::UnknownLabel(format!(
                    "{y:?} (image of {x:?}) is not in the codomain"
                )))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Exhaustive pair scan: `x <= y` implies `f(x) <= f(y)`.
pub fn check_isotone(
    f: &BTreeMap<Label, Label>,
    l: &FiniteOrderedSet,
    r: &FiniteOrderedSet,
) -> Result<bool> {
    require_total(f, l, r)?;
    for x in l.elements() {
        for y in l.elements() {
            if l.cmp_labels(x, y)?.is_le() && !r.cmp_labels(&f[x], &f[y])?.is_le() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Exhaustive pair scan: `x <= y` implies `f(y) <= f(x)`.
pub fn check_antitone(
    f: &BTreeMap<Label, Label>,
    l: &FiniteOrderedSet,
    r: &FiniteOrderedSet,
) -> Result<bool> {
    require_total(f, l, r)?;
    for x in l.elements() {
        for y in l.elements() {
            if l.cmp_labels(x, y)?.is_le() && !r.cmp_labels(&f[y], &f[x])?.is_le() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Is the image of `f` coinitial in `r`: for every `z` in `r` some image
/// value lies at or below `z`.
pub fn check_coinitial(
    f: &BTreeMap<Label, Label>,
    l: &FiniteOrderedSet,
    r: &FiniteOrderedSet,
) -> Result<bool> {
    require_total(f, l, r)?;
    let image: Vec<&Label> = l.elements().iter().map(|x| &f[x]).collect();
    for z in r.elements() {
        let mut reached = false;
        for y in &image {
            if r.cmp_labels(y, z)?.is_le() {
                reached = true;
                break;
            }
        }
        if !reached {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(labels: &[&str]) -> FiniteOrderedSet {
        FiniteOrderedSet::from_strs(labels)
    }

    #[test]
    fn dual_reverses_and_is_involutive() {
        let l = set(&["u", "v", "w"]);
        assert_eq!(l.dual().elements(), &["w", "v", "u"]);
        assert_eq!(l.dual().dual(), l);
        let empty = set(&[]);
        assert_eq!(empty.dual(), empty);
        let two = set(&["u", "v"]);
        assert_eq!(two.dual().dual(), two);
    }

    #[test]
    fn order_is_positional_not_textual() {
        let l = set(&["z", "a"]);
        assert_eq!(l.cmp_labels("z", "a").unwrap(), std::cmp::Ordering::Less);
    }

    #[test]
    fn one_point_extension_places_bottom_first() {
        let l = set(&["u", "v"]);
        let s = BottomedOrderedSet::one_point_extension(&l, "bot").unwrap();
        assert_eq!(s.elements(), &["bot", "u", "v"]);
        assert_eq!(s.bottom(), "bot");
        assert_eq!(s.stars(), &["u", "v"]);

        let empty = set(&[]);
        let s = BottomedOrderedSet::one_point_extension(&empty, "bot").unwrap();
        assert_eq!(s.elements(), &["bot"]);

        let l = set(&["u"]);
        assert!(matches!(
            BottomedOrderedSet::one_point_extension(&l, "u"),
            Err(Error::LabelCollision(_))
        ));
    }

    #[test]
    fn characteristic_subsets() {
        let s = BottomedOrderedSet::from_strs(&["bot", "a", "b", "c"]);
        let t: BTreeSet<Label> = ["bot", "a"].iter().map(|s| s.to_string()).collect();
        assert!(is_characteristic(&t, &s).unwrap());

        let only_bottom: BTreeSet<Label> = ["bot"].iter().map(|s| s.to_string()).collect();
        assert!(!is_characteristic(&only_bottom, &s).unwrap());

        let all: BTreeSet<Label> = s.elements().iter().cloned().collect();
        assert!(is_characteristic(&all, &s).unwrap());

        let outside: BTreeSet<Label> = ["zz"].iter().map(|s| s.to_string()).collect();
        assert!(is_characteristic(&outside, &s).is_err());
    }

    #[test]
    fn characteristic_monotone_in_subset() {
        let s = BottomedOrderedSet::from_strs(&["bot", "a", "b", "c"]);
        let t: BTreeSet<Label> = ["bot", "a"].iter().map(|x| x.to_string()).collect();
        let bigger: BTreeSet<Label> = ["bot", "a", "c"].iter().map(|x| x.to_string()).collect();
        assert!(is_characteristic(&t, &s).unwrap());
        assert!(is_characteristic(&bigger, &s).unwrap());
    }

    /// Independent oracle: enumerate every subset and keep those satisfying
    /// the four cut conditions literally.
    fn cuts_by_definition(l: &FiniteOrderedSet) -> Vec<Vec<Label>> {
        let n = l.len();
        let mut found = Vec::new();
        for mask in 0u32..(1 << n) {
            let members: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            if members.is_empty() {
                continue; // nonempty
            }
            // finite, so always bounded above; downward closed:
            let max = *members.iter().max().unwrap();
            let down_closed = (0..=max).all(|i| members.contains(&i));
            if !down_closed {
                continue;
            }
            // the supremum exists (finite) and equals max, which is a member
            found.push(members.iter().map(|i| l.elements()[*i].clone()).collect());
        }
        found.sort_by_key(|c: &Vec<Label>| c.len());
        found
    }

    #[test]
    fn dedekind_completion_matches_cut_oracle() {
        let l = set(&["u", "v"]);
        let comp = dedekind_completion(&l).unwrap();
        assert_eq!(comp.cuts.len(), 2);
        assert_eq!(comp.cuts, cuts_by_definition(&l));
        // embedding is bijective onto the cuts
        let mut image = comp.embedding.clone();
        image.sort_unstable();
        image.dedup();
        assert_eq!(image.len(), comp.cuts.len());

        let one = set(&["u"]);
        assert_eq!(dedekind_completion(&one).unwrap().cuts.len(), 1);

        assert!(dedekind_completion(&set(&[])).is_err());
    }

    #[test]
    fn dedekind_embedding_is_isotone() {
        let l = set(&["u", "v", "w"]);
        let comp = dedekind_completion(&l).unwrap();
        for i in 0..l.len() {
            for j in 0..l.len() {
                assert_eq!(
                    i <= j,
                    comp.embedding[i] <= comp.embedding[j],
                    "embedding must preserve and reflect order"
                );
            }
        }
    }

    #[test]
    fn completion_isomorphic_for_small_sets() {
        for n in 1..=6usize {
            let labels: Vec<Label> = (0..n).map(|i| format!("e{i}")).collect();
            let l = FiniteOrderedSet::new(labels).unwrap();
            let comp = dedekind_completion(&l).unwrap();
            assert_eq!(comp.cuts.len(), l.len());
            assert_eq!(comp.cuts, cuts_by_definition(&l));
        }
    }

    #[test]
    fn isotone_antitone_coinitial_scans() {
        let l = set(&["u", "v"]);
        let id: BTreeMap<Label, Label> = l
            .elements()
            .iter()
            .map(|x| (x.clone(), x.clone()))
            .collect();
        assert!(check_isotone(&id, &l, &l).unwrap());

        let flip: BTreeMap<Label, Label> = [("u", "v"), ("v", "u")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert!(!check_isotone(&flip, &l, &l).unwrap());
        assert!(check_antitone(&flip, &l, &l).unwrap());

        let to_min: BTreeMap<Label, Label> = [("u", "u"), ("v", "u")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert!(check_coinitial(&to_min, &l, &l).unwrap());

        let partial: BTreeMap<Label, Label> = [("u", "u")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert!(matches!(
            check_isotone(&partial, &l, &l),
            Err(Error::NotTotal(_))
        ));
    }
}
