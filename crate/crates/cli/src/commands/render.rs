//! `render`: PNG of one pipeline stage with annotation boxes.

use usv_core::annotations::read_annotations;
use usv_core::audio::load_wav;
use usv_core::enhance::normalize_to_u8;
use usv_core::render::{mask_to_gray, render_image, save_png};
use usv_core::spectrogram::{MagnitudeScale, DB_EPSILON};
use usv_core::{pipeline, GrayImage};

use super::detect::recording_id;
use crate::args::{RenderArgs, RenderStage};
use crate::error::{CliError, Outcome};
use crate::files::load_config;

pub fn run(args: &RenderArgs) -> Result<Outcome, CliError> {
    let cfg = load_config(args.config.as_deref())?;
    let id = recording_id(&args.input);
    let rec = load_wav(&args.input, cfg.channel)?;
    let out = pipeline::run(&rec, &id, &cfg)?;
    let img: GrayImage = match args.stage {
        RenderStage::Raw => {
            // always shown on a dB scale
            let values = &out.spectrogram.values;
            match cfg.spectrogram.magnitude_scale {
                MagnitudeScale::Decibel => normalize_to_u8(values),
                MagnitudeScale::Linear => normalize_to_u8(&values.map(|&m| 20.0 * (m + DB_EPSILON).log10())),
            }
        }
        RenderStage::Cleaned => out.enhanced.equalized.clone(),
        RenderStage::Mask => mask_to_gray(&out.enhanced.mask),
    };
    let annotations = match &args.annotations {
        Some(p) => read_annotations(p)?.annotations,
        None => out.annotations.annotations,
    };
    let png = render_image(&img, &out.spectrogram.axes, &annotations);
    if let Some(parent) = args.output.parent().filter(|p| !p.as_os_str().is_empty()) {
        crate::files::create_dir(parent)?;
    }
    save_png(&png, &args.output)?;
    Ok(Outcome::Success)
}
