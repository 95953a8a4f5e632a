//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the code paths it checks.

#![allow(dead_code)]

use antdesign::fitness::MetricVector;
use antdesign::problem::{DesignProblem, DesignSolution, Element};
use antdesign::surrogate::Observation;
use rand::seq::SliceRandom;
use rand::Rng;

/// Textbook population standard deviation.
pub fn std_dev(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

fn class_index(solution: &DesignSolution, element: Element) -> usize {
    solution
        .classes()
        .iter()
        .position(|members| members.contains(&element))
        .expect("element placed")
}

/// Recounts CBO, NAC and ATMR straight from the class lists.
pub fn brute_metrics(problem: &DesignProblem, solution: &DesignSolution) -> MetricVector {
    let crossing = problem
        .uses()
        .iter()
        .filter(|u| {
            class_index(solution, Element::Method(u.method)) != class_index(solution, Element::Attribute(u.attribute))
        })
        .count();
    let attrs: Vec<f64> = solution
        .classes()
        .iter()
        .map(|c| c.iter().filter(|e| matches!(e, Element::Attribute(_))).count() as f64)
        .collect();
    let meths: Vec<f64> = solution
        .classes()
        .iter()
        .map(|c| c.iter().filter(|e| matches!(e, Element::Method(_))).count() as f64)
        .collect();
    let ratios: Vec<f64> = attrs
        .iter()
        .zip(&meths)
        .map(|(&a, &m)| if m == 0.0 { a } else { a / m })
        .collect();
    MetricVector {
        cbo: crossing as f64 / problem.uses().len() as f64,
        nac: (std_dev(&attrs) + std_dev(&meths)) / 2.0,
        atmr: std_dev(&ratios),
    }
}

pub fn brute_dominates(a: &MetricVector, b: &MetricVector) -> bool {
    let le = a.cbo <= b.cbo && a.nac <= b.nac && a.atmr <= b.atmr;
    let lt = a.cbo < b.cbo || a.nac < b.nac || a.atmr < b.atmr;
    le && lt
}

/// O(n²) pairwise filter.
pub fn brute_non_dominated(set: &[MetricVector]) -> Vec<usize> {
    (0..set.len())
        .filter(|&i| !(0..set.len()).any(|j| j != i && brute_dominates(&set[j], &set[i])))
        .collect()
}

/// Least squares through the normal equations, solved by Gaussian
/// elimination with partial pivoting.
pub fn normal_equations(observations: &[Observation]) -> [f64; 4] {
    let mut xtx = [[0.0f64; 4]; 4];
    let mut xty = [0.0f64; 4];
    for o in observations {
        let row = [1.0, o.metrics.cbo, o.metrics.nac, o.metrics.atmr];
        for i in 0..4 {
            xty[i] += row[i] * o.rating as f64;
            for j in 0..4 {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    let mut a = [[0.0f64; 5]; 4];
    for i in 0..4 {
        a[i][..4].copy_from_slice(&xtx[i]);
        a[i][4] = xty[i];
    }
    for col in 0..4 {
        let pivot = (col..4).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs())).unwrap();
        a.swap(col, pivot);
        for r in 0..4 {
            if r != col {
                let f = a[r][col] / a[col][col];
                let pivot_row = a[col];
                for (x, p) in a[r].iter_mut().zip(pivot_row).skip(col) {
                    *x -= f * p;
                }
            }
        }
    }
    [a[0][4] / a[0][0], a[1][4] / a[1][1], a[2][4] / a[2][2], a[3][4] / a[3][3]]
}

/// Random complete assignment of the problem's elements to its classes.
pub fn random_solution<R: Rng>(problem: &DesignProblem, rng: &mut R) -> DesignSolution {
    let mut classes = vec![Vec::new(); problem.class_count()];
    let mut elements: Vec<Element> = problem.elements().collect();
    elements.shuffle(rng);
    for e in elements {
        classes[rng.random_range(0..problem.class_count())].push(e);
    }
    DesignSolution::new(classes)
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}
