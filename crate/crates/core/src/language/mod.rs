//! The language `L` of the β-shift: words `w` all of whose suffixes are
//! lexicographically dominated by the matching prefix of `c`.

mod automaton;
mod kmp;
mod suffix;
mod word;

pub use automaton::{is_member_oracle, Edge, PrefixAutomaton, Walk, Words};
pub use suffix::{suffix_info, z_after, zbar, zbar_profile, SuffixInfo, ZbarPoint, ZbarProfile, ZbarVerdict};
pub use word::Word;
