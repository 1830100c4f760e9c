//! Research-trend analysis over exported citation records.

pub mod cluster;
pub mod graphs;
pub mod ingest;
pub mod pipeline;
pub mod render;
pub mod textprep;
pub mod topics;
pub mod trends;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/ingest.md")]
    struct Ingest;
    #[doc = include_str!("../../../book/src/textprep.md")]
    struct Textprep;
    #[doc = include_str!("../../../book/src/trends.md")]
    struct Trends;
    #[doc = include_str!("../../../book/src/clustering.md")]
    struct Clustering;
    #[doc = include_str!("../../../book/src/topics.md")]
    struct Topics;
    #[doc = include_str!("../../../book/src/networks.md")]
    struct Networks;
    #[doc = include_str!("../../../book/src/rendering.md")]
    struct Rendering;
    #[doc = include_str!("../../../book/src/pipeline.md")]
    struct Pipeline;
}
