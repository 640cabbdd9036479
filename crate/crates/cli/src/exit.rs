//! Error classes and their exit codes.

use edgeshift::genfun::GenFunError;
use edgeshift::langmodel::LangError;
use edgeshift::measures::MeasureError;
use edgeshift::ratfield::AlgebraError;
use edgeshift::specfile::SpecFileError;
use edgeshift::spectral::SpectralError;
use edgeshift::verify::VerifyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("verification failed")]
    Verify,
    #[error("{0}")]
    Spec(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Verify => 1,
            CliError::Spec(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Numeric(_) => 4,
            CliError::Io { .. } => 5,
        }
    }
}

fn lang(e: &LangError) -> fn(String) -> CliError {
    match e {
        LangError::Budget { .. } => CliError::Budget,
        LangError::Overflow => CliError::Numeric,
        _ => CliError::Spec,
    }
}

fn algebra(_: &AlgebraError) -> fn(String) -> CliError {
    CliError::Numeric
}

fn genfun(e: &GenFunError) -> fn(String) -> CliError {
    match e {
        GenFunError::Lang(l) => lang(l),
        GenFunError::NotReduced => CliError::Spec,
        _ => CliError::Numeric,
    }
}

fn spectral(e: &SpectralError) -> fn(String) -> CliError {
    match e {
        SpectralError::Lang(l) => lang(l),
        SpectralError::GenFun(g) => genfun(g),
        SpectralError::Algebra(a) => algebra(a),
        SpectralError::Empty(_) | SpectralError::Reducible(_) | SpectralError::Word(_) => CliError::Spec,
        _ => CliError::Numeric,
    }
}

fn measure(e: &MeasureError) -> fn(String) -> CliError {
    match e {
        MeasureError::Spectral(s) => spectral(s),
        MeasureError::Lang(l) => lang(l),
        MeasureError::Algebra(a) => algebra(a),
        MeasureError::Budget(_) => CliError::Budget,
        MeasureError::Overflow | MeasureError::Irrational => CliError::Numeric,
        _ => CliError::Spec,
    }
}

macro_rules! classify {
    ($t:ty, $f:ident) => {
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                $f(&e)(e.to_string())
            }
        }
    };
}

classify!(LangError, lang);
classify!(GenFunError, genfun);
classify!(SpectralError, spectral);
classify!(MeasureError, measure);
classify!(AlgebraError, algebra);

impl From<SpecFileError> for CliError {
    fn from(e: SpecFileError) -> Self {
        match &e {
            SpecFileError::Lang(l) => lang(l)(e.to_string()),
            SpecFileError::Json(_) => CliError::Spec(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        let class = match &e {
            VerifyError::Lang(l) => lang(l),
            VerifyError::GenFun(g) => genfun(g),
            VerifyError::Algebra(a) => algebra(a),
            VerifyError::Spectral(s) => spectral(s),
            VerifyError::Measure(m) => measure(m),
        };
        class(e.to_string())
    }
}
