//! Convex polygon clipping against axis-aligned rectangles.

/// A point in the `(y, s)` plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub y: f64,
    pub s: f64,
}

impl Point {
    pub fn new(y: f64, s: f64) -> Self {
        Self { y, s }
    }
}

/// Axis-aligned rectangle `[y0, y1] × [s0, s1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub y0: f64,
    pub y1: f64,
    pub s0: f64,
    pub s1: f64,
}

impl Rect {
    pub fn area(&self) -> f64 {
        (self.y1 - self.y0) * (self.s1 - self.s0)
    }
}

/// Shoelace area of a simple polygon (absolute value).
pub fn polygon_area(poly: &[Point]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for (i, p) in poly.iter().enumerate() {
        let q = poly[(i + 1) % poly.len()];
        twice += p.y * q.s - q.y * p.s;
    }
    0.5 * twice.abs()
}

#[derive(Clone, Copy)]
enum Edge {
    Left(f64),
    Right(f64),
    Bottom(f64),
    Top(f64),
}

impl Edge {
    fn inside(self, p: Point) -> bool {
        match self {
            Edge::Left(v) => p.y >= v,
            Edge::Right(v) => p.y <= v,
            Edge::Bottom(v) => p.s >= v,
            Edge::Top(v) => p.s <= v,
        }
    }

    fn intersect(self, a: Point, b: Point) -> Point {
        match self {
            Edge::Left(v) | Edge::Right(v) => {
                let u = (v - a.y) / (b.y - a.y);
                Point::new(v, a.s + u * (b.s - a.s))
            }
            Edge::Bottom(v) | Edge::Top(v) => {
                let u = (v - a.s) / (b.s - a.s);
                Point::new(a.y + u * (b.y - a.y), v)
            }
        }
    }
}

/// Sutherland–Hodgman clip of a convex polygon to `rect`.
pub fn clip_to_rect(poly: &[Point], rect: &Rect) -> Vec<Point> {
    let mut out: Vec<Point> = poly.to_vec();
    let mut scratch = Vec::with_capacity(poly.len() + 4);
    for edge in [
        Edge::Left(rect.y0),
        Edge::Right(rect.y1),
        Edge::Bottom(rect.s0),
        Edge::Top(rect.s1),
    ] {
        if out.is_empty() {
            break;
        }
        scratch.clear();
        let mut prev = *out.last().unwrap();
        let mut prev_in = edge.inside(prev);
        for &cur in &out {
            let cur_in = edge.inside(cur);
            match (prev_in, cur_in) {
                (true, true) => scratch.push(cur),
                (true, false) => scratch.push(edge.intersect(prev, cur)),
                (false, true) => {
                    scratch.push(edge.intersect(prev, cur));
                    scratch.push(cur);
                }
                (false, false) => {}
            }
            prev = cur;
            prev_in = cur_in;
        }
        std::mem::swap(&mut out, &mut scratch);
    }
    out
}

/// Area of `poly ∩ rect` for a convex polygon.
pub fn overlap_area(poly: &[Point], rect: &Rect) -> f64 {
    polygon_area(&clip_to_rect(poly, rect))
}
