use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;
use segmap_core::graph::{Edge, SegGraph};
use segmap_core::grid::generate_d2;
use segmap_core::pipeline::embed;
use segmap_core::raster::{CellState, BACKGROUND};
use segmap_core::render::{
    height, normal_at, normal_from_runs, render_image, shade, shading_coefficients, RgbImage, ShadingProfile,
};

fn slope(x1: f64, x2: f64, x: f64, p: &ShadingProfile, sep: bool) -> f64 {
    let (a, b) = shading_coefficients(x1, x2, x, p, sep);
    2.0 * (a * x + b)
}

proptest! {
    #[test]
    fn ramp_constraints(x1 in -50.0f64..50.0, len in 2.0f64..80.0, r in 2usize..16, h in 0.1f64..4.0) {
        let p = ShadingProfile { h, ..ShadingProfile::new(r, 1) };
        let x2 = x1 + len;
        let w = p.w.min(len / 2.0);
        for sep in [false, true] {
            let s = if sep { -1.0 } else { 1.0 };
            prop_assert!(height(x1, x2, x1, &p, sep).abs() < 1e-9);
            prop_assert!(height(x1, x2, x2, &p, sep).abs() < 1e-9);
            prop_assert!((height(x1, x2, x1 + w, &p, sep) - s * h).abs() < 1e-9);
            prop_assert!(slope(x1, x2, x1 + w, &p, sep).abs() < 1e-9);
            prop_assert!(slope(x1, x2, x2 - w, &p, sep).abs() < 1e-9);
            // the slope is the derivative of the height
            let x = x1 + 0.37 * w;
            let e = 1e-6;
            let num = (height(x1, x2, x + e, &p, sep) - height(x1, x2, x - e, &p, sep)) / (2.0 * e);
            prop_assert!((num - slope(x1, x2, x, &p, sep)).abs() < 1e-5);
        }
    }
}

#[test]
fn plateau_normal_is_vertical() {
    let p = ShadingProfile::new(8, 1);
    assert_eq!(normal_from_runs((0.0, 64.0, 32.5), (0.0, 64.0, 20.5), &p, false), [0.0, 0.0, 1.0]);
    let g = SegGraph::from_parts(1, vec![1], vec![Edge { a: 0, b: 1, weight: 1 }]);
    let cs = CellState::new(8, 8, vec![0; 64], Arc::new(g)).unwrap();
    for (px, py) in [(20, 20), (32, 40), (5, 30)] {
        assert_eq!(normal_at(px, py, &cs, &p), [0.0, 0.0, 1.0]);
    }
    assert_ne!(normal_at(0, 30, &cs, &p), [0.0, 0.0, 1.0]);
}

#[test]
fn separator_is_a_valley() {
    let p = ShadingProfile::new(8, 2);
    assert_eq!(height(0.0, 40.0, 20.0, &p, true), -p.h);
    assert_eq!(height(0.0, 40.0, 20.0, &p, false), p.h);
    // the entry ramp of a separator tilts the other way
    assert!(slope(0.0, 40.0, 1.0, &p, true) < 0.0);
    assert!(slope(0.0, 40.0, 1.0, &p, false) > 0.0);
}

fn blobs(img: &RgbImage, color: [u8; 3]) -> usize {
    let (w, h) = (img.width, img.height);
    let mut seen = vec![false; w * h];
    let mut count = 0;
    for start in 0..w * h {
        if seen[start] || img.pixel(start % w, start / w) != color {
            continue;
        }
        count += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(i) = stack.pop() {
            let (x, y) = (i % w, i / w);
            let around = [(x.wrapping_sub(1), y), (x + 1, y), (x, y.wrapping_sub(1)), (x, y + 1)];
            for (nx, ny) in around {
                if nx < w && ny < h && !seen[ny * w + nx] && img.pixel(nx, ny) == color {
                    seen[ny * w + nx] = true;
                    stack.push(ny * w + nx);
                }
            }
        }
    }
    count
}

#[test]
fn one_glyph_per_crossing() {
    let e = embed(&generate_d2()).unwrap();
    assert!(e.initial.num_crossings() > 0);
    let mut p = ShadingProfile::new(8, e.stats.num_segments);
    p.crossing_color = [255, 0, 255];
    p.palette = (0..e.stats.num_segments as i32).map(|l| (l, [40, 120 + 10 * l as u8, 60])).collect();
    let img = render_image(&e.initial, &p).unwrap();
    assert_eq!((img.width, img.height), (8 * e.initial.width(), 8 * e.initial.height()));
    let mark = shade(p.crossing_color, [0.0, 0.0, 1.0], p.light_direction);
    assert_eq!(blobs(&img, mark), e.initial.num_crossings());
}

#[test]
fn same_colored_neighbors_stay_distinguishable() {
    // two segments side by side, painted the same
    let g = SegGraph::from_parts(
        2,
        vec![1, 1],
        vec![Edge { a: 0, b: 1, weight: 1 }, Edge { a: 0, b: 2, weight: 1 }, Edge { a: 1, b: 2, weight: 1 }],
    );
    let cells: Vec<i32> = (0..64).map(|i| if i % 8 < 4 { 0 } else { 1 }).collect();
    let cs = CellState::new(8, 8, cells, Arc::new(g)).unwrap();
    let mut p = ShadingProfile::new(8, 2);
    p.palette = BTreeMap::from([(0, [200, 60, 60]), (1, [200, 60, 60])]);
    let img = render_image(&cs, &p).unwrap();
    let y = 32;
    let plateau = img.pixel(16, y);
    let (left, right) = (img.pixel(31, y), img.pixel(32, y));
    assert_ne!(left, plateau);
    assert_ne!(right, plateau);
    assert_ne!(left, right);
}

#[test]
fn background_drawn_in_separator_color() {
    let g = SegGraph::from_parts(1, vec![1], vec![Edge { a: 0, b: 1, weight: 1 }]);
    let mut cells = vec![0; 100];
    for y in 3..7 {
        for x in 3..7 {
            cells[y * 10 + x] = BACKGROUND;
        }
    }
    let cs = CellState::new(10, 10, cells, Arc::new(g)).unwrap();
    let p = ShadingProfile::new(8, 1);
    let img = render_image(&cs, &p).unwrap();
    assert_eq!(img.pixel(40, 40), shade(p.separator_color, [0.0, 0.0, 1.0], p.light_direction));
    let png = img.to_png().unwrap();
    let dec = png::Decoder::new(std::io::Cursor::new(png));
    let mut reader = dec.read_info().unwrap();
    let mut buf = vec![0; reader.output_buffer_size().unwrap()];
    let info = reader.next_frame(&mut buf).unwrap();
    assert_eq!(&buf[..info.buffer_size()], &img.pixels[..]);
    assert!(img.to_ppm().starts_with(b"P6\n80 80\n255\n"));
}
