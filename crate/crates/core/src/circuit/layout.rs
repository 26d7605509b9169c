//! Rotated planar layout.
//!
//! Data qubit `(r, c)`, `0 <= r, c < d`, has index `r * d + c`. A check sits on
//! the face whose north-west corner is data `(row, col)`, with `row, col` in
//! `-1..d`. Bulk faces alternate X/Z type as `row + col` is even/odd. The left
//! and right edges carry weight-2 X-type checks and the top and bottom edges
//! weight-2 Z-type checks, so the X logical is a horizontal string and the Z
//! logical a vertical one. Ancilla indices follow the data block in check order.

/// Position of a data qubit inside a check's face.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corner {
    NW = 0,
    NE = 1,
    SW = 2,
    SE = 3,
}

impl Corner {
    fn offset(self) -> (i32, i32) {
        match self {
            Corner::NW => (0, 0),
            Corner::NE => (0, 1),
            Corner::SW => (1, 0),
            Corner::SE => (1, 1),
        }
    }
}

/// Interaction order of X-type checks. The last two gates hit a vertical
/// pair, across the horizontal X logical, so hook errors do not shorten it.
pub const X_TYPE_ORDER: [Corner; 4] = [Corner::NW, Corner::SW, Corner::NE, Corner::SE];
/// Interaction order of Z-type checks; hooks land on horizontal pairs.
pub const Z_TYPE_ORDER: [Corner; 4] = [Corner::NW, Corner::NE, Corner::SW, Corner::SE];

/// CSS type of a face. For the XZZX code this is the type of the face's
/// preimage under the checkerboard Hadamard deformation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CheckType {
    X,
    Z,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub check_type: CheckType,
    pub row: i32,
    pub col: i32,
    /// Data qubit at each corner, indexed by `Corner as usize`.
    pub corners: [Option<u32>; 4],
}

impl Check {
    pub fn data_qubits(&self) -> impl Iterator<Item = u32> + '_ {
        self.corners.iter().flatten().copied()
    }

    pub fn weight(&self) -> usize {
        self.corners.iter().flatten().count()
    }

    pub fn order(&self) -> [Corner; 4] {
        match self.check_type {
            CheckType::X => X_TYPE_ORDER,
            CheckType::Z => Z_TYPE_ORDER,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RotatedLayout {
    pub distance: u32,
    pub checks: Vec<Check>,
}

impl RotatedLayout {
    pub fn new(distance: u32) -> Self {
        let d = distance as i32;
        let mut checks = Vec::new();
        for row in -1..d {
            for col in -1..d {
                let check_type = if (row + col).rem_euclid(2) == 0 { CheckType::X } else { CheckType::Z };
                let on_lr = col == -1 || col == d - 1;
                let on_tb = row == -1 || row == d - 1;
                let keep = match (on_lr, on_tb) {
                    (false, false) => true,
                    (true, true) => false,
                    (true, false) => check_type == CheckType::X,
                    (false, true) => check_type == CheckType::Z,
                };
                if !keep {
                    continue;
                }
                let mut corners = [None; 4];
                for corner in [Corner::NW, Corner::NE, Corner::SW, Corner::SE] {
                    let (dr, dc) = corner.offset();
                    let (r, c) = (row + dr, col + dc);
                    if (0..d).contains(&r) && (0..d).contains(&c) {
                        corners[corner as usize] = Some((r * d + c) as u32);
                    }
                }
                checks.push(Check { check_type, row, col, corners });
            }
        }
        Self { distance, checks }
    }

    pub fn num_data(&self) -> u32 {
        self.distance * self.distance
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_data() + self.checks.len() as u32
    }

    pub fn ancilla(&self, check_index: usize) -> u32 {
        self.num_data() + check_index as u32
    }

    /// `(row, col)` of a data qubit.
    pub fn data_coords(&self, q: u32) -> (u32, u32) {
        (q / self.distance, q % self.distance)
    }

    /// Checkerboard parity used by the XZZX deformation.
    pub fn is_odd(&self, q: u32) -> bool {
        let (r, c) = self.data_coords(q);
        (r + c) % 2 == 1
    }

    /// Data qubits of the top row.
    pub fn horizontal_logical(&self) -> Vec<u32> {
        (0..self.distance).collect()
    }

    /// Data qubits of the left column.
    pub fn vertical_logical(&self) -> Vec<u32> {
        (0..self.distance).map(|r| r * self.distance).collect()
    }
}
