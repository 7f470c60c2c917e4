pub mod forward;
pub mod pomdp;
