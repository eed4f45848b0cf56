//! JSON channel documents and the number formatting used for reports.
//!
//! ```json
//! {"type": "gaussian", "t_x": 1, "t_p": 1, "n_x": 0, "n_p": 0}
//! {"type": "measure_prepare", "r": 0, "gamma": 1, "R": 0, "q": 0, "acceptance_c": 0}
//! ```

use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::channels::{Channel, GaussianChannelSpec, MeasurePrepareSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelDocument {
    Gaussian {
        t_x: f64,
        t_p: f64,
        n_x: f64,
        n_p: f64,
    },
    MeasurePrepare {
        r: f64,
        gamma: f64,
        #[serde(rename = "R")]
        big_r: f64,
        #[serde(default)]
        q: f64,
        #[serde(default)]
        acceptance_c: f64,
    },
}

impl ChannelDocument {
    /// Parses and validates a document.
    pub fn parse(text: &str) -> Result<Self> {
        let doc: ChannelDocument =
            serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        doc.to_channel()?;
        Ok(doc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Document(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Pretty JSON with every number at 17 significant digits.
    pub fn to_json(&self) -> String {
        to_canonical_json(self)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n")
            .map_err(|e| Error::Document(format!("{}: {e}", path.display())))
    }

    /// Validated channel; complete positivity is checked for Gaussian channels.
    pub fn to_channel(&self) -> Result<Channel> {
        match *self {
            ChannelDocument::Gaussian { t_x, t_p, n_x, n_p } => {
                let spec = GaussianChannelSpec::new(t_x, t_p, n_x, n_p)?;
                spec.ensure_completely_positive()?;
                Ok(spec.into())
            }
            ChannelDocument::MeasurePrepare {
                r,
                gamma,
                big_r,
                q,
                acceptance_c,
            } => Ok(MeasurePrepareSpec::new(r, gamma, big_r, q, acceptance_c)?.into()),
        }
    }
}

impl From<Channel> for ChannelDocument {
    fn from(channel: Channel) -> Self {
        match channel {
            Channel::Gaussian(s) => ChannelDocument::Gaussian {
                t_x: s.t_x,
                t_p: s.t_p,
                n_x: s.n_x,
                n_p: s.n_p,
            },
            Channel::MeasurePrepare(s) => ChannelDocument::MeasurePrepare {
                r: s.measure_squeeze,
                gamma: s.gamma,
                big_r: s.prepare_squeeze,
                q: s.output_squeeze,
                acceptance_c: s.acceptance,
            },
        }
    }
}

/// Pretty printer writing floats as `{:.16e}`, which round-trips every `f64`.
pub struct FixedDigits(PrettyFormatter<'static>);

impl Default for FixedDigits {
    fn default() -> Self {
        Self(PrettyFormatter::new())
    }
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(w $(, $arg)*)
            }
        )*
    };
}

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        begin_object_value();
        end_object_value();
    }
}

/// Serializes with [`FixedDigits`].
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits::default());
    value
        .serialize(&mut ser)
        .expect("serializing to memory cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}
