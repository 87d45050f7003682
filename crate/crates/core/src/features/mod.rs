//! Feature matrices under the baseline, composition and elemental schemes, plus
//! train-only standardization.

mod builder;
mod schema;
mod standardize;

pub use builder::{
    baseline_features, build_features, composition_features, derive_schema, elemental_features, encode, mixture,
    FeatureContext, FeaturizationPlan, Scheme, ONE_HOT_GROUPS,
};
pub(crate) use schema::hex;
pub use schema::{ColumnKind, FeatureGroup, FeatureMatrix, FeatureSchema};
pub use standardize::{apply_standardizer, fit_standardizer, Standardizer};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{
        DataRecord, Dataset, ElementProperties, ElementProperty, ElementTable, Labels, MaterialRegistry, MaterialSpec,
        Orientation, PostProcessing, Process, Subprocess,
    };

    fn spec(name: &str, comp: &[(&str, f64)], density: f64, k: f64, tm: f64, cte: f64, cp: f64) -> MaterialSpec {
        MaterialSpec {
            name: name.into(),
            composition: comp.iter().map(|(e, w)| (e.to_string(), *w)).collect(),
            density,
            specific_heat: cp,
            thermal_conductivity: k,
            melting_temperature: tm,
            cte,
        }
    }

    fn registry() -> MaterialRegistry {
        let mut reg = MaterialRegistry::new(["Al", "Ti", "V", "Nb"].map(String::from).to_vec());
        reg.insert(spec("Ti6Al4V ELI", &[("Al", 6.0), ("Ti", 90.0), ("V", 4.0)], 4.41, 7.0, 1650.0, 8.5, 526.0), false)
            .unwrap();
        reg.insert(spec("Nb", &[("Nb", 100.0)], 8.57, 53.7, 2477.0, 7.3, 265.0), false).unwrap();
        reg
    }

    fn elements() -> ElementTable {
        let mut t = ElementTable::default();
        for (s, z, vol, ie, hf, ea) in [
            ("Al", 13, 10.0, 5.9858, 10.71, 0.433),
            ("Ti", 22, 10.6, 6.8281, 14.15, 0.079),
            ("V", 23, 8.35, 6.7462, 21.5, 0.528),
            ("Nb", 41, 10.8, 6.7589, 30.0, 0.893),
        ] {
            t.insert(ElementProperties {
                symbol: s.into(),
                atomic_number: z,
                atomic_volume: vol,
                ionization_energy: ie,
                heat_of_fusion: hf,
                electron_affinity: ea,
            })
            .unwrap();
        }
        t
    }

    fn point_300() -> DataRecord {
        DataRecord {
            material: "Ti6Al4V ELI".into(),
            process: Process::Pbf,
            subprocess: Subprocess::LPbf,
            machine: "EOS M4OO SF".into(),
            orientation: Orientation::Horizontal,
            post_processing: PostProcessing::AsBuilt,
            surface_condition: None,
            beam_power: Some(1000.0),
            scan_speed: None,
            layer_thickness: Some(30.0),
            beam_diameter: None,
            labels: Labels { ys: Some(923.8), ..Default::default() },
        }
    }

    fn dataset(records: Vec<DataRecord>) -> Dataset {
        let mut ds = Dataset::new();
        for r in records {
            ds.push(r, "");
        }
        ds
    }

    #[test]
    fn data_point_300_numeric_prefix() {
        let x = baseline_features(&dataset(vec![point_300()]), &registry()).unwrap();
        assert_eq!(&x.row(0)[..7], &[1000.0, 30.0, 4.41, 1650.0, 7.0, 526.0, 8.5]);
        assert_eq!(
            &x.schema().names()[..7],
            &["beam_power", "layer_thickness", "density", "melting_point", "thermal_conductivity", "specific_heat", "cte"]
        );
    }

    #[test]
    fn material_group_spans_registry() {
        let x = baseline_features(&dataset(vec![point_300()]), &registry()).unwrap();
        let groups = x.schema().groups();
        let mat = groups.iter().find(|g| g.name == "material").unwrap();
        assert_eq!(mat.columns.len(), 2);
        let block = &x.row(0)[mat.columns.clone()];
        assert_eq!(block.iter().sum::<f64>(), 1.0);
        assert_eq!(block, &[0.0, 1.0]);
    }

    #[test]
    fn identical_categoricals_give_identical_blocks() {
        let mut b = point_300();
        b.beam_power = Some(400.0);
        let x = baseline_features(&dataset(vec![point_300(), b]), &registry()).unwrap();
        assert_eq!(&x.row(0)[7..], &x.row(1)[7..]);
    }

    #[test]
    fn incomplete_record_is_named() {
        let mut r = point_300();
        r.layer_thickness = None;
        let mut ds = Dataset::new();
        ds.push(r, "lit-12");
        let err = baseline_features(&ds, &registry()).unwrap_err().to_string();
        assert!(err.contains("lit-12") && err.contains("layer_thickness"), "{err}");
    }

    #[test]
    fn composition_columns() {
        let mut nb = point_300();
        nb.material = "Nb".into();
        let ds = dataset(vec![point_300(), nb]);
        let reg = registry();
        let base = baseline_features(&ds, &reg).unwrap();
        let x = composition_features(&ds, &reg, &base).unwrap();
        let k = base.cols();
        assert_eq!(&x.schema().names()[k..], &["wt_Al", "wt_Ti", "wt_V", "wt_Nb"]);
        assert_eq!(&x.row(0)[k..], &[6.0, 90.0, 4.0, 0.0]);
        assert_eq!(&x.row(1)[k..], &[0.0, 0.0, 0.0, 100.0]);
    }

    #[test]
    fn mixture_rule_values() {
        let reg = registry();
        let el = elements();
        let ti = reg.get("Ti6Al4V ELI").unwrap();
        let z = mixture(ti, &el, ElementProperty::AtomicNumber).unwrap();
        assert!((z - 21.50).abs() < 1e-12);
        let nb = reg.get("Nb").unwrap();
        assert_eq!(mixture(nb, &el, ElementProperty::HeatOfFusion).unwrap(), 30.0);
        let half = spec("half", &[("Al", 50.0), ("V", 50.0)], 1.0, 1.0, 1000.0, 1.0, 100.0);
        assert!((mixture(&half, &el, ElementProperty::AtomicVolume).unwrap() - 9.175).abs() < 1e-12);
    }

    #[test]
    fn elemental_requires_coverage() {
        let ds = dataset(vec![point_300()]);
        let reg = registry();
        let base = baseline_features(&ds, &reg).unwrap();
        let x = elemental_features(&ds, &reg, &elements(), &base).unwrap();
        assert_eq!(x.cols(), base.cols() + 5);
        let mut partial = ElementTable::default();
        partial.insert(elements().get("Ti").unwrap().clone()).unwrap();
        let err = elemental_features(&ds, &reg, &partial, &base).unwrap_err().to_string();
        assert!(err.contains("Al"), "{err}");
    }

    #[test]
    fn unseen_levels_encode_as_zero_block() {
        let reg = registry();
        let train = dataset(vec![point_300()]);
        let plan = FeaturizationPlan::default();
        let schema = derive_schema(&train, &reg, &plan);
        let mut other = point_300();
        other.machine = "Trumpf".into();
        let (x, warnings) = encode(&dataset(vec![other]), &schema, FeatureContext { registry: &reg, elements: None }).unwrap();
        let g = schema.groups().into_iter().find(|g| g.name == "machine").unwrap();
        assert!(x.row(0)[g.columns].iter().all(|&v| v == 0.0));
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("Trumpf"));
    }

    #[test]
    fn standardizer_hand_values() {
        let x: FeatureMatrix<f64> = FeatureMatrix::from_rows(&[vec![1.0, 5.0], vec![2.0, 5.0], vec![3.0, 5.0]]).unwrap();
        let s = fit_standardizer(&x, false).unwrap();
        assert!((s.stds[0] - 0.816_496_580_927_726).abs() < 1e-12);
        assert_eq!(s.passthrough, vec![false, true]);
        let z = apply_standardizer(&s, &x).unwrap();
        let c0 = z.column(0);
        assert!((c0[0] + 1.224_744_871_391_589).abs() < 1e-12);
        assert_eq!(c0[1], 0.0);
        assert!((c0[2] - 1.224_744_871_391_589).abs() < 1e-12);
        assert_eq!(z.column(1), vec![0.0, 0.0, 0.0]);
        assert!(fit_standardizer(&FeatureMatrix::<f64>::from_rows(&[]).unwrap(), false).is_err());
    }

    #[test]
    fn one_hot_columns_left_alone_by_default() {
        let mut b = point_300();
        b.orientation = Orientation::Vertical;
        let x = baseline_features(&dataset(vec![point_300(), b]), &registry()).unwrap();
        let s = fit_standardizer(&x, false).unwrap();
        let z = s.apply(&x).unwrap();
        let g = x.schema().groups().into_iter().find(|g| g.name == "orientation").unwrap();
        assert_eq!(&z.row(0)[g.columns.clone()], &x.row(0)[g.columns.clone()]);
        let all = fit_standardizer(&x, true).unwrap().apply(&x).unwrap();
        assert_eq!(all.row(0)[g.columns.start].abs(), 1.0);
    }
}
