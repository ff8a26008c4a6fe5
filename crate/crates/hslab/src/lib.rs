pub mod attack;
pub mod bits;
pub mod cipher;
pub mod gf2;
pub mod group;
pub mod instance;
pub mod kwise;
pub mod oracle;
pub mod reduce;
pub mod report;
pub mod solve;
