pub mod courant;
pub mod darboux;
pub mod gcs;
pub mod liecalc;
pub mod moser;
pub mod linalg;
pub mod random;
pub mod report;
pub mod scenario;
pub mod symbolic;
