//! Scenario presets covering the full chamber test sweep: boards and dummy
//! model at ten distances, the car at four, the traffic signs at five, plus a
//! background-only reference.

use crate::CliError;
use fogsim_core::scene::{build_scene, Scene, SceneConfig, TargetConfig};

/// One placed test: a scene plus a file-safe name.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub scene: Scene,
}

fn placed(template: &str, range_m: f64, offset_m: f64) -> TargetConfig {
    // Targets sit side by side with small lateral gaps, like the physical
    // chamber setups. Offsets stay within +-1.15 m so even at 5 m the oblique
    // range penalty of edge beams remains below the ROI gate.
    TargetConfig { template: template.into(), range_m, offset_m, height_m: None }
}

fn scenario(name: String, targets: Vec<TargetConfig>) -> Result<Scenario, CliError> {
    let scene = build_scene(&SceneConfig { targets, chamber_length_m: 30.0 })
        .map_err(|e| CliError::Validation(format!("preset scenario {name}: {e}")))?;
    Ok(Scenario { name, scene })
}

fn range_tag(r: f64) -> String {
    format!("r{}", format!("{r}").replace('.', "_"))
}

/// Boards A/B/C and the dummy model, 5 m to 25 m every 2.5 m plus 27 m.
pub fn boards() -> Result<Vec<Scenario>, CliError> {
    let mut out = Vec::new();
    for r in [5.0, 7.5, 10.0, 12.5, 15.0, 17.5, 20.0, 22.5, 25.0, 27.0] {
        out.push(scenario(
            format!("boards_{}", range_tag(r)),
            vec![
                placed("board_a", r, -0.9),
                placed("board_b", r, -0.3),
                placed("board_c", r, 0.3),
                placed("dummy_model", r, 0.9),
            ],
        )?);
    }
    Ok(out)
}

/// The car, 10 m to 25 m every 5 m.
pub fn car() -> Result<Vec<Scenario>, CliError> {
    let mut out = Vec::new();
    for r in [10.0, 15.0, 20.0, 25.0] {
        out.push(scenario(format!("car_{}", range_tag(r)), vec![placed("car", r, 0.0)])?);
    }
    Ok(out)
}

/// Both traffic signs, 10 m to 25 m every 5 m plus 22.5 m.
pub fn signs() -> Result<Vec<Scenario>, CliError> {
    let mut out = Vec::new();
    for r in [10.0, 15.0, 20.0, 22.5, 25.0] {
        out.push(scenario(
            format!("signs_{}", range_tag(r)),
            vec![placed("traffic_sign_1", r, -0.6), placed("traffic_sign_2", r, 0.6)],
        )?);
    }
    Ok(out)
}

/// Background-only run (no targets).
pub fn background() -> Result<Vec<Scenario>, CliError> {
    Ok(vec![scenario("background".into(), vec![])?])
}

/// Resolve a preset by name.
pub fn resolve(name: &str) -> Result<Vec<Scenario>, CliError> {
    match name {
        "paper-boards" => boards(),
        "paper-car" => car(),
        "paper-signs" => signs(),
        "paper-background" => background(),
        "paper-all" => {
            let mut all = boards()?;
            all.extend(car()?);
            all.extend(signs()?);
            Ok(all)
        }
        other => Err(CliError::Validation(format!(
            "unknown preset `{other}` (known: paper-boards, paper-car, paper-signs, paper-background, paper-all)"
        ))),
    }
}

/// Azimuth window covering the scene with margin, degrees.
pub fn azimuth_window(scene: &Scene, margin_deg: f64) -> (f64, f64) {
    match scene.azimuth_span_deg() {
        Some((lo, hi)) => (lo - margin_deg, hi + margin_deg),
        None => (-margin_deg, margin_deg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn board_preset_covers_ten_distances() {
        let s = boards().unwrap();
        assert_eq!(s.len(), 10);
        assert!(s.iter().all(|sc| sc.scene.targets.len() == 4));
        assert_eq!(s[0].name, "boards_r5");
        assert_eq!(s[1].name, "boards_r7_5");
        assert_eq!(s[9].name, "boards_r27");
    }

    #[test]
    fn all_preset_counts() {
        assert_eq!(resolve("paper-all").unwrap().len(), 10 + 4 + 5);
        assert_eq!(resolve("paper-signs").unwrap().len(), 5);
        assert!(resolve("nope").is_err());
    }

    #[test]
    fn windows_contain_targets() {
        for sc in resolve("paper-all").unwrap() {
            let (lo, hi) = azimuth_window(&sc.scene, 2.0);
            let (slo, shi) = sc.scene.azimuth_span_deg().unwrap();
            assert!(lo < slo && hi > shi);
            assert!(hi - lo < 40.0, "window for {} too wide: {}..{}", sc.name, lo, hi);
        }
    }
}
