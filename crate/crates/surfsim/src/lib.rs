pub mod decoder;
pub mod experiment;
pub mod layout;
pub mod noise;
pub mod pauli;
pub mod sim;
pub mod schedule;
