use tabula_service::{Action, CreateSession, Event, LogEntry, Session, SessionError, Status, StopMode};

fn session(integrand: &str) -> Session {
    Session::create(
        "s",
        &CreateSession {
            integrand: integrand.into(),
            var: "x".into(),
        },
    )
    .unwrap()
}

/// Undoing a step gives back the view from before it, at every depth.
#[test]
fn undo_after_step_is_the_identity() {
    for f in ["x^3*sin(2*x)", "exp(x)*cos(x)", "ln(x)^2", "(x + 1)*exp(-x)", "x^2*ln(x)"] {
        let mut s = session(f);
        s.act(&Action::ChooseSplit { index: Some(0), u: None }).unwrap();
        for _ in 0..4 {
            let before = serde_json::to_string(&s.view()).unwrap();
            if s.act(&Action::Step).is_err() {
                break;
            }
            s.act(&Action::Undo).unwrap();
            assert_eq!(serde_json::to_string(&s.view()).unwrap(), before, "{f}");
            s.act(&Action::Step).unwrap();
        }
    }
}

#[test]
fn finalized_sessions_carry_a_verified_trace() {
    let mut s = session("x*exp(x)");
    s.act(&Action::ChooseSplit { index: Some(0), u: None }).unwrap();
    s.act(&Action::Step).unwrap();
    let view = s.act(&Action::Stop { mode: StopMode::Direct }).unwrap();
    assert_eq!(view.status, Status::Finalized);
    assert!(tabula::ibp::verify(s.trace().unwrap()).passed);
    assert_eq!(view.antiderivative.unwrap().ascii, "(x - 1)*exp(x) + C");
}

#[test]
fn rejected_actions_are_not_logged() {
    let mut s = session("ln(x)");
    assert!(matches!(s.act(&Action::Undo), Err(SessionError::Illegal(_))));
    assert!(s.act(&Action::ChooseSplit { index: Some(9), u: None }).is_err());
    assert!(s.act(&Action::ChooseSplit { index: Some(0), u: Some("x".into()) }).is_err());
    assert_eq!(s.log().len(), 1);
}

#[test]
fn log_lines_have_the_documented_shape() {
    let mut s = session("ln(x)");
    s.act(&Action::ChooseSplit { index: None, u: Some("ln(x)".into()) }).unwrap();
    let lines: Vec<serde_json::Value> = s.log().iter().map(|e| serde_json::to_value(e).unwrap()).collect();
    assert_eq!(lines[0]["action"], serde_json::json!({"integrand": "ln(x)", "var": "x"}));
    assert_eq!(lines[1]["action"], serde_json::json!({"type": "choose_split", "u": "ln(x)"}));
    assert_eq!(lines[1]["seq"], 1);
    assert!(lines[1]["timestamp"].is_u64());
    let back: LogEntry = serde_json::from_value(lines[1].clone()).unwrap();
    assert!(matches!(back.action, Event::Act(Action::ChooseSplit { .. })));
}

#[test]
fn replay_rejects_malformed_logs() {
    assert!(matches!(Session::replay("s", &[]), Err(SessionError::BadLog(_))));
    let step = LogEntry {
        seq: 0,
        action: Event::Act(Action::Step),
        timestamp: 0,
    };
    assert!(matches!(Session::replay("s", &[step]), Err(SessionError::BadLog(_))));
}
