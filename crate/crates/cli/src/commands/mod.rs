pub mod build_rewards;
pub mod correct;
pub mod evaluate;
pub mod synth;
