//! Word clouds and chart files.

mod chart;
mod cloud;

use thiserror::Error;

pub use chart::{emit_chart_data, ChartData, ChartOutput};
pub use cloud::{
    emit_svg, font_size, glyph_advance, layout_cloud, text_extent, Canvas, CloudItem, CloudStyle, Rect,
    WordCloudLayout,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("nothing to draw")]
    EmptyInput,
    #[error("canvas cannot hold even the largest word")]
    CanvasTooSmall,
}
