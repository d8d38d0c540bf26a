//! The employee/student knowledge base used throughout the docs and tests.

use crate::model::{ConceptExpr, KnowledgeBase};

pub const EMPLOYEE_KB: &str = "\
# Employees and students.
concept Emp, Student, PhdStudent, Adult, Young
role has_SSN, has_boss, has_classes, hasScholarship

Emp <= Adult
Adult <= exists has_SSN.Top
PhdStudent <= Student

T(Emp) <= Young @ -50
T(Emp) <= exists has_boss.Emp @ 100
T(Emp) <= exists has_classes.Top @ -70

T(Student) <= Young @ 90
T(Student) <= exists has_classes.Top @ 80
T(Student) <= exists hasScholarship.Top @ -30
";

/// [`EMPLOYEE_KB`] built directly, without going through the parser.
pub fn employee_kb() -> KnowledgeBase {
    use ConceptExpr as C;
    let mut kb = KnowledgeBase::new();
    for c in ["Emp", "Student", "PhdStudent", "Adult", "Young"] {
        kb.declare_concept(c);
    }
    for r in ["has_SSN", "has_boss", "has_classes", "hasScholarship"] {
        kb.declare_role(r);
    }
    kb.add_strict(C::atomic("Emp"), C::atomic("Adult"))
        .add_strict(C::atomic("Adult"), C::exists("has_SSN", C::Top))
        .add_strict(C::atomic("PhdStudent"), C::atomic("Student"));
    kb.add_defeasible("Emp", C::atomic("Young"), -50)
        .add_defeasible("Emp", C::exists("has_boss", C::atomic("Emp")), 100)
        .add_defeasible("Emp", C::exists("has_classes", C::Top), -70);
    kb.add_defeasible("Student", C::atomic("Young"), 90)
        .add_defeasible("Student", C::exists("has_classes", C::Top), 80)
        .add_defeasible("Student", C::exists("hasScholarship", C::Top), -30);
    kb
}
