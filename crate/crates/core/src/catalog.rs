//! Built-in example problems.
//!
//! Each entry is stored as problem-file text so the same parser serves the
//! catalog and user files. Certified `M` and `K1..K4` are hand-derived
//! bounds shipped as metadata; the condition check uses them as given.

use crate::problem::ProblemFile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example {
    pub id: u8,
    pub title: &'static str,
    /// The raw equation and boundary data in readable form.
    pub equation: &'static str,
    pub source: &'static str,
    /// Iterations to reach `e(k) <= 1e-15` reported for this problem.
    pub expected_iterations: Option<usize>,
    pub note: &'static str,
}

impl Example {
    pub fn problem(&self) -> ProblemFile {
        ProblemFile::parse(self.source).expect("built-in examples parse")
    }

    /// Whether the shipped metadata certifies uniqueness.
    pub fn is_certified(&self) -> bool {
        let c = self.problem().certificate;
        c.m.is_some() && c.k.iter().all(Option::is_some)
    }
}

pub const EXAMPLES: [Example; 6] = [
    Example {
        id: 1,
        title: "manufactured solution",
        equation: "u'''' = 12 + u u'''/2 - u' u''/4 + u'/4,  u(0)=u(1)=u'(0)=u'(1)=0",
        source: "\
f = 12 + u*z/2 - y*v/4 + y/4
exact = x^4/2 - x^3 + x^2/2
M = 36
K1 = 18
K2 = 37/4
K3 = 1/(8*sqrt(3))
K4 = 3/64
",
        expected_iterations: Some(25),
        note: "Exact solution x^2 (1-x)^2 / 2. K2 = M/4 + 1/4 is not the smallest \
               admissible constant; the lattice estimate is smaller.",
    },
    Example {
        id: 2,
        title: "all derivatives present",
        equation: "u'''' = x + x^2 + u^2 u'' + u' sin(u'''),  u(0)=u(1)=u'(0)=u'(1)=0",
        source: "\
f = x + x^2 + u^2*v + y*sin(z)
M = 5
K1 = 25/192
K2 = 1
K3 = 25/147456
K4 = 5/(72*sqrt(3))
",
        expected_iterations: Some(23),
        note: "No closed-form solution.",
    },
    Example {
        id: 3,
        title: "w^2 sin w, nonzero left value",
        equation: "w'''' = w^2 sin(w) + sin(x),  w(0)=1, w(1)=w'(0)=w'(1)=0",
        source: "\
f = u^2*sin(u) + sin(x)
A1 = 1
M = 6
K1 = 12545/4096
K2 = 0
K3 = 0
K4 = 0
",
        expected_iterations: Some(23),
        note: "Homogenized with P(x) = 2x^3 - 3x^2 + 1. The certified box gives \
               uniqueness in |w - P| <= 6/384, so |w| <= 1.015625.",
    },
    Example {
        id: 4,
        title: "w sin w with Gaussian forcing",
        equation: "w'''' = w sin(w) + exp(-x^2),  w(0)=1, w(1)=w'(0)=w'(1)=0",
        source: "\
f = u*sin(u) + exp(-x^2)
A1 = 1
M = 6
K1 = 129/64
K2 = 0
K3 = 0
K4 = 0
",
        expected_iterations: Some(24),
        note: "Homogenized with P(x) = 2x^3 - 3x^2 + 1. Unique in |w| <= 1.015625.",
    },
    Example {
        id: 5,
        title: "square root, general interval",
        equation: "w'''' = sqrt(w) sin(exp(w)) + exp(-t^2),  w(a)=A1, w(b)=B1, w'(a)=A2, w'(b)=B2",
        source: "\
f = sqrt(u)*sin(exp(u)) + exp(-x^2)
a = 0
b = 1
A1 = 1
B1 = 0
A2 = 0
B2 = 0
M = 6
",
        expected_iterations: None,
        note: "Boundary data are free parameters; (a,b,A1,B1,A2,B2) = (0,1,1,0,0,0) \
               is only a default, and M = 6 bounds |f| for that data. |f| is bounded \
               on every box, so a solution exists, but sqrt has no Lipschitz bound \
               where w = u + P reaches 0, and no uniqueness is claimed.",
    },
    Example {
        id: 6,
        title: "quintic nonlinearity",
        equation: "w'''' = w^5,  w(0)=0, w(1)=1.87, w'(0)=0, w'(1)=5.61",
        source: "\
f = u^5
B1 = 1.87
B2 = 5.61
M = 100
K1 = 103
K2 = 0
K3 = 0
K4 = 0
",
        expected_iterations: Some(23),
        note: "Homogenized with P(x) = 1.87 x^3. Existence theorems based on a box \
               |w_i| <= 2 k_i around the cubic (k_0 >= 1.87 bounding |P|) do not apply: \
               there max |f| = 32 k_0^5, and with the clamped constant 1/384 their \
               growth condition asks for 384 k_0 / (32 k_0^5) = 12 / k_0^4 >= 1, \
               which fails for every k_0 >= 1.87. Here M = 100 and K1 = 5 (100/384 + 1.87)^4 \
               rounded up to 103 give q below 1/2.",
    },
];

pub fn get(id: u8) -> Option<&'static Example> {
    EXAMPLES.iter().find(|e| e.id == id)
}
