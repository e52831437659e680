use std::path::Path;

use goldtri::shell::{load_patch, parse_patch, patch_json, render_svg, save_patch, PALETTE};
use goldtri::subst::{default_seed, supertile};
use goldtri::{Patch, RenderStyle, ShellError, TileError};

#[test]
fn save_then_load_is_identity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s7.json");
    let p = supertile(7, &default_seed()).unwrap();
    save_patch(&p, &path).unwrap();
    let q = load_patch(&path).unwrap();
    assert_eq!(p, q);
    assert!(q.iter().zip(p.iter()).all(|(a, b)| a.sides == b.sides));
}

#[test]
fn overlapping_tiles_are_rejected_with_both_named() {
    let p = supertile(1, &default_seed()).unwrap();
    let json: serde_json::Value = serde_json::from_str(&patch_json(&p)).unwrap();
    let tiles = json["tiles"].as_array().unwrap();
    let seed = serde_json::to_value(default_seed()).unwrap();
    // The order-0 tile covers both order-1 tiles.
    let text = serde_json::json!({"tiles": [tiles[0].clone(), seed]}).to_string();
    match parse_patch(&text, Path::new("bad.json")) {
        Err(ShellError::Invalid {
            path,
            source: TileError::Overlap { new, existing },
        }) => {
            assert_eq!(path, Path::new("bad.json"));
            assert_ne!(new, existing);
        }
        other => panic!("expected an overlap error, got {other:?}"),
    }
}

#[test]
fn syntax_errors_report_line_and_column() {
    let err =
        parse_patch("{\n  \"tiles\": [\n    oops\n  ]\n}\n", Path::new("x.json")).unwrap_err();
    match err {
        ShellError::Parse { line, column, .. } => assert_eq!((line, column), (3, 5)),
        other => panic!("expected a parse error, got {other:?}"),
    }
    assert!(err_text("{\"tiles\": 3}").starts_with("x.json:1:"));
}

fn err_text(s: &str) -> String {
    parse_patch(s, Path::new("x.json")).unwrap_err().to_string()
}

#[test]
fn missing_file_is_an_io_error() {
    let err = load_patch(Path::new("/nonexistent/patch.json")).unwrap_err();
    assert!(matches!(err, ShellError::Io { .. }));
}

#[test]
fn render_has_one_polygon_per_tile() {
    let p = supertile(5, &default_seed()).unwrap();
    assert_eq!(p.len(), 13);
    let svg = render_svg(&p, &RenderStyle::default());
    assert_eq!(svg.matches("class=\"tile\"").count(), 13);
    assert_eq!(svg.matches("<line").count(), 39);
    assert_eq!(svg.matches("class=\"arrow\"").count(), 39);
    let plain = render_svg(
        &p,
        &RenderStyle {
            arrows: false,
            ..RenderStyle::default()
        },
    );
    assert_eq!(plain.matches("class=\"arrow\"").count(), 0);
}

#[test]
fn render_is_deterministic_and_uses_the_palette() {
    let p = supertile(6, &default_seed()).unwrap();
    let a = render_svg(&p, &RenderStyle::default());
    assert_eq!(a, render_svg(&p, &RenderStyle::default()));
    assert!(a.starts_with("<svg ") && a.ends_with("</svg>\n"));
    let used = PALETTE.iter().filter(|c| a.contains(*c)).count();
    assert_eq!(used, 4);
}

#[test]
fn empty_patch_renders() {
    let svg = render_svg(&Patch::new(), &RenderStyle::default());
    assert!(svg.starts_with("<svg ") && svg.ends_with("</svg>\n"));
    assert!(!svg.contains("<polygon"));
}
