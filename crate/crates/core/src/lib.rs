pub mod builder;
pub mod corpus;
pub mod decomposition;
pub mod forest;
pub mod generate;
pub mod graph;
pub mod linkage;
pub mod oracles;
