#![allow(dead_code)]

use std::collections::VecDeque;

use perimeter_defense::assignment::{DefenderSpec, Task};
use perimeter_defense::geometry::{reference_territory, ConvexPolygon, Point2};
use rand::Rng;
use perimeter_defense::static_design::FactorField;

/// Published station coordinates for one, two and three stations.
pub fn paper_stations(n: usize) -> Vec<Point2> {
    let pts: &[(f64, f64)] = match n {
        1 => &[(-7.50, 7.50)],
        2 => &[(-6.19, 10.37), (-4.99, -5.05)],
        3 => &[(3.17, 16.16), (3.33, -6.37), (-16.92, 2.74)],
        _ => panic!("no published layout for {n} stations"),
    };
    pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()
}

/// Area of the connected set `{factor ≥ 0} \ Ω` touching Ω, by 4-neighbour
/// flood fill on a `cells × cells` grid of half-width `half` around the
/// centroid.
pub fn flood_fill_area(field: &FactorField, ratio: f64, poly: &ConvexPolygon, half: f64, cells: usize) -> f64 {
    let c = poly.centroid();
    let h = 2.0 * half / cells as f64;
    let center = |i: usize, j: usize| Point2::new(c.x - half + (i as f64 + 0.5) * h, c.y - half + (j as f64 + 0.5) * h);
    let mut inside = vec![false; cells * cells];
    let mut member = vec![false; cells * cells];
    for j in 0..cells {
        for i in 0..cells {
            let p = center(i, j);
            inside[j * cells + i] = poly.contains(p);
            member[j * cells + i] = !inside[j * cells + i] && field.evaluate(p, ratio) >= 0.0;
        }
    }
    let neighbours = |k: usize| {
        let (i, j) = (k % cells, k / cells);
        let mut out = Vec::with_capacity(4);
        if i > 0 {
            out.push(k - 1);
        }
        if i + 1 < cells {
            out.push(k + 1);
        }
        if j > 0 {
            out.push(k - cells);
        }
        if j + 1 < cells {
            out.push(k + cells);
        }
        out
    };
    let mut seen = vec![false; cells * cells];
    let mut queue: VecDeque<usize> = (0..cells * cells)
        .filter(|&k| member[k] && neighbours(k).iter().any(|&n| inside[n]))
        .collect();
    for &k in &queue {
        seen[k] = true;
    }
    let mut count = 0usize;
    while let Some(k) = queue.pop_front() {
        count += 1;
        for n in neighbours(k) {
            if member[n] && !seen[n] {
                seen[n] = true;
                queue.push_back(n);
            }
        }
    }
    count as f64 * h * h
}

/// Defenders inside the reference territory and tasks on its perimeter, sorted by time.
pub fn random_instance(rng: &mut impl Rng, n: usize, m: usize) -> (Vec<DefenderSpec>, Vec<Task>) {
    let poly = reference_territory();
    let defenders = (0..n)
        .map(|_| DefenderSpec {
            pos: poly.clamp_inside(Point2::new(rng.gen_range(-30.0..20.0), rng.gen_range(-20.0..30.0))),
            v_max: 3.0,
        })
        .collect();
    let mut tasks: Vec<Task> = (0..m as u64)
        .map(|id| Task {
            id,
            arrival_point: poly.point_at(rng.gen_range(0.0..poly.perimeter())),
            // coarse times so equal-time (forbidden) pairs show up
            arrival_time: rng.gen_range(4..48) as f64 * 0.25,
            prioritized: rng.gen_bool(0.3),
            source_intruder: id,
        })
        .collect();
    tasks.sort_by(|a, b| a.arrival_time.total_cmp(&b.arrival_time).then(a.id.cmp(&b.id)));
    (defenders, tasks)
}
