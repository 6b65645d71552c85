//! Entropy-coding baselines: bit packing, static symbol models, and the
//! arithmetic, Rice, Huffman, and LZW coders over delta sequences.

pub mod ae;
pub mod bits;
pub mod golomb;
pub mod huffman;
pub mod lzw;
pub mod model;
