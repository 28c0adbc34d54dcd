//! KTP model shared by the integration tests.

use cddc_core::dispersion::{
    DispersionModel, OpticalAxis, SellmeierForm, SellmeierSet, ThermoOptic,
};

pub fn ktp() -> DispersionModel {
    let y = SellmeierSet {
        axis: OpticalAxis::Y,
        form: SellmeierForm::OnePole([2.19229, 0.83547, 0.04970, 0.01621]),
        thermo: ThermoOptic::Quadratic {
            n1: vec![6.2897e-6, 6.3061e-6, -6.0629e-6, 2.6486e-6],
            n2: vec![-0.14445e-8, 2.2244e-8, -3.5770e-8, 1.3470e-8],
        },
        t_ref_c: 25.0,
        lambda_min_nm: 400.0,
        lambda_max_nm: 3500.0,
    };
    let z = SellmeierSet {
        axis: OpticalAxis::Z,
        form: SellmeierForm::TwoPole([2.12725, 1.18431, 5.14852e-2, 0.6603, 100.00507, 9.68956e-3]),
        thermo: ThermoOptic::Quadratic {
            n1: vec![9.9587e-6, 9.9228e-6, -8.9603e-6, 4.1010e-6],
            n2: vec![-1.1882e-8, 10.459e-8, -9.8136e-8, 3.1481e-8],
        },
        t_ref_c: 25.0,
        lambda_min_nm: 400.0,
        lambda_max_nm: 3500.0,
    };
    DispersionModel::new("KTP", vec![y, z]).unwrap()
}
