pub mod competitive;
pub mod economy;
pub mod error;
pub mod knowledge;
pub mod learning;
pub mod numerics;
pub mod politics;
pub mod production;
pub mod reforms;
pub mod report;
pub mod sampling;
pub mod scenario;
pub mod verify;
pub mod welfare;

pub use error::{Error, ErrorClass, Result};
pub use knowledge::{
    check_diffuse, coverage, fragmentation, system_knowledge, CivicParams, DiffuseCheck,
    KnowledgeBundle, SimplexVector,
};
pub use learning::{LearningConstants, LearningFamily, LearningTech};
pub use economy::Economy;
pub use politics::{GovernanceTech, PoliticalOutcome};
pub use production::{Allocation, OracleGrid, ProductiveOptimum};
pub use scenario::Scenario;
pub use welfare::WelfareReport;
