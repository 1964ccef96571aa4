//! Closed-form results for the Dicke and quantum Rabi models.

pub mod dicke;
pub mod rabi;

pub use dicke::{
    bare_mode_occupation, coherent_qfi, dfreq_lower, ground_state_qfi,
    ground_state_qfi_near_critical, normal_frequencies, real_squeezing_qfi, squeezing_parameters,
    virtual_mode_occupation, CoherentQfi, DerivativeConvention, DickeParams, NormalFrequencies,
    SqueezingPair, VirtualOccupation,
};
pub use rabi::{
    rabi_coherent_qfi, rabi_effective, rabi_ground_qfi, strategy_displaced,
    strategy_extract_evolved, strategy_extract_static, strategy_normal_mode, strategy_synergy,
    RabiEffective, RabiParams, StrategyId, StrategyResult,
};
