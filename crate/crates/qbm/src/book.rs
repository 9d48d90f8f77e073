//! Doc-test bridge: the guide's code snippets compile as tests of this crate.
