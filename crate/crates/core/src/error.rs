use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    #[error("NonIntegerExponent: z-exponent {0} is not a nonnegative integer")]
    NonIntegerExponent(String),
    #[error("ModeMismatch: cannot mix exact and numeric coefficients")]
    ModeMismatch,
    #[error("DivergentProduct: infinite q-Pochhammer product needs |q| < 1")]
    DivergentProduct,
    #[error("NoConvergence: {0}")]
    NoConvergence(String),
    #[error("ZeroPolynomial: all coefficients vanish")]
    ZeroPolynomial,
    #[error("ConstantPolynomial: no finite root (root at infinity)")]
    ConstantPolynomial,
    #[error("NegativeAlpha: depth needs alpha_1 >= 0")]
    NegativeAlpha,
    #[error("EmptyInput: {0}")]
    EmptyInput(String),
    #[error("NonRepresentableExponent: {0}")]
    NonRepresentableExponent(String),
    #[error("NonzeroConstant: the factor (0;) has a nonzero coefficient")]
    NonzeroConstant,
    #[error("ConstantNotRoot: [z^0]P(c) does not vanish")]
    ConstantNotRoot,
    #[error("IncompatibleDenominator: exponent {0} is not a multiple of 1/{1}")]
    IncompatibleDenominator(String, u64),
    #[error("NotSolvedForm: the operator is not in solved form")]
    NotSolvedForm,
    #[error("InfinitelyMany: an indicial polynomial vanishes identically, infinitely many exponents are possible")]
    InfinitelyMany,
    #[error("NeedsRamification: only non-integer exponents are available")]
    NeedsRamification,
    #[error("UniquenessViolated: the linear coefficient vanishes at n = {0}")]
    UniquenessViolated(usize),
    #[error("MissingInitialValue: f_0 is undetermined and must be supplied")]
    MissingInitialValue,
    #[error("NotNormalized: {0}")]
    NotNormalized(String),
    #[error("ModeError: {0}")]
    ModeError(String),
    #[error("NotApplicable: {0}")]
    NotApplicable(String),
    #[error("NoShiftingPart: the operator has no shifting factor")]
    NoShiftingPart,
    #[error("MaxStepsExceeded: crest still nonlinear after {steps} steps")]
    MaxStepsExceeded { steps: usize, heights: Vec<String> },
    #[error("NotDivergentRegime: {0}")]
    NotDivergentRegime(String),
    #[error("NonPolynomialQuotient: f_{0} is not a Laurent polynomial in q; use numeric mode")]
    NonPolynomialQuotient(usize),
    #[error("SyntaxError at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("NonIntegerSigmaIndex: {0}")]
    NonIntegerSigmaIndex(String),
    #[error("Io: {0}")]
    Io(String),
}

impl QError {
    /// Short typed name, as printed by the command line tool.
    pub fn name(&self) -> &'static str {
        match self {
            QError::NonIntegerExponent(_) => "NonIntegerExponent",
            QError::ModeMismatch => "ModeMismatch",
            QError::DivergentProduct => "DivergentProduct",
            QError::NoConvergence(_) => "NoConvergence",
            QError::ZeroPolynomial => "ZeroPolynomial",
            QError::ConstantPolynomial => "ConstantPolynomial",
            QError::NegativeAlpha => "NegativeAlpha",
            QError::EmptyInput(_) => "EmptyInput",
            QError::NonRepresentableExponent(_) => "NonRepresentableExponent",
            QError::NonzeroConstant => "NonzeroConstant",
            QError::ConstantNotRoot => "ConstantNotRoot",
            QError::IncompatibleDenominator(..) => "IncompatibleDenominator",
            QError::NotSolvedForm => "NotSolvedForm",
            QError::InfinitelyMany => "InfinitelyMany",
            QError::NeedsRamification => "NeedsRamification",
            QError::UniquenessViolated(_) => "UniquenessViolated",
            QError::MissingInitialValue => "MissingInitialValue",
            QError::NotNormalized(_) => "NotNormalized",
            QError::ModeError(_) => "ModeError",
            QError::NotApplicable(_) => "NotApplicable",
            QError::NoShiftingPart => "NoShiftingPart",
            QError::MaxStepsExceeded { .. } => "MaxStepsExceeded",
            QError::NotDivergentRegime(_) => "NotDivergentRegime",
            QError::NonPolynomialQuotient(_) => "NonPolynomialQuotient",
            QError::Syntax { .. } => "SyntaxError",
            QError::NonIntegerSigmaIndex(_) => "NonIntegerSigmaIndex",
            QError::Io(_) => "Io",
        }
    }

    /// Process exit code: 2 parse, 3 precondition, 4 numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            QError::Syntax { .. } | QError::NonIntegerSigmaIndex(_) | QError::Io(_) => 2,
            QError::NoConvergence(_)
            | QError::ZeroPolynomial
            | QError::ConstantPolynomial
            | QError::DivergentProduct
            | QError::MaxStepsExceeded { .. }
            | QError::UniquenessViolated(_)
            | QError::NonPolynomialQuotient(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, QError>;
