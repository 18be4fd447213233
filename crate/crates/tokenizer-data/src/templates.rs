//! Fixed, versioned sentence templates for the synthetic SSN corpus, 25 per
//! domain across five domains. Placeholders: `{name}` (always before the
//! SSN), `{ssn}`, and optionally `{date}`. The text before `{ssn}` is unique
//! across all templates (the generator asserts this), so any two template
//! instantiations of the same identity yield distinct prompts.
//!
//! Charset is deliberately narrow — letters, digits (from fillers only), and
//! `, . : -` — so detokenization round-trips exactly.

pub const DOMAINS: [&str; 5] = ["employment", "tax", "financial", "government", "medical"];

/// Total number of templates across all domains.
pub const TEMPLATE_COUNT: usize = 125;

const EMPLOYMENT: [&str; 25] = [
    "Employee {name} filed SSN {ssn} with payroll on {date}.",
    "The onboarding record for {name} lists SSN {ssn}.",
    "HR verified that {name} holds SSN {ssn} on {date}.",
    "New hire {name} reported SSN {ssn} to the staffing office.",
    "Contract worker {name} registered SSN {ssn} on {date}.",
    "Payroll clerk noted that {name} uses SSN {ssn}.",
    "The badge request for {name} cites SSN {ssn}.",
    "Timesheet records for {name} carry SSN {ssn} since {date}.",
    "Supervisor confirmed {name} entered SSN {ssn} on {date}.",
    "The employment file of {name} contains SSN {ssn}.",
    "Recruiter logged {name} with SSN {ssn} on {date}.",
    "Benefits enrollment for {name} used SSN {ssn}.",
    "The union roster shows {name} under SSN {ssn}.",
    "Overtime claims from {name} reference SSN {ssn}.",
    "The staffing ledger pairs {name} with SSN {ssn} as of {date}.",
    "Workplace insurance covers {name} under SSN {ssn}.",
    "The transfer memo for {name} repeats SSN {ssn}.",
    "Orientation forms from {name} disclose SSN {ssn} dated {date}.",
    "A wage audit tied {name} to SSN {ssn}.",
    "The severance packet for {name} quotes SSN {ssn}.",
    "Training logs enrolled {name} with SSN {ssn} on {date}.",
    "The employer copy for {name} prints SSN {ssn}.",
    "Direct deposit setup for {name} required SSN {ssn}.",
    "The job application from {name} included SSN {ssn} on {date}.",
    "Shift records for {name} attribute SSN {ssn}.",
];

const TAX: [&str; 25] = [
    "Taxpayer {name} filed a return under SSN {ssn} on {date}.",
    "The refund claim from {name} lists SSN {ssn}.",
    "An audit notice for {name} cites SSN {ssn} dated {date}.",
    "Form records show {name} declaring SSN {ssn}.",
    "The revenue office matched {name} to SSN {ssn} on {date}.",
    "Quarterly estimates from {name} carry SSN {ssn}.",
    "A withholding statement for {name} notes SSN {ssn}.",
    "The amended return of {name} repeats SSN {ssn} on {date}.",
    "Deduction schedules from {name} reference SSN {ssn}.",
    "The filing portal registered {name} under SSN {ssn} on {date}.",
    "Late penalties for {name} accrued against SSN {ssn}.",
    "The exemption request from {name} shows SSN {ssn}.",
    "A dependent claim by {name} uses SSN {ssn}.",
    "The levy notice addressed {name} at SSN {ssn} on {date}.",
    "Estimated payments by {name} credit SSN {ssn}.",
    "The transcript request for {name} displays SSN {ssn}.",
    "An extension filed by {name} records SSN {ssn} on {date}.",
    "The preparer enrolled {name} with SSN {ssn}.",
    "Income summaries for {name} embed SSN {ssn}.",
    "The settlement offer from {name} states SSN {ssn} dated {date}.",
    "Agency reviewers linked {name} with SSN {ssn}.",
    "The garnishment order for {name} specifies SSN {ssn}.",
    "Credit carryovers for {name} attach to SSN {ssn} on {date}.",
    "The taxpayer advocate assisted {name} regarding SSN {ssn}.",
    "Electronic filings by {name} validated SSN {ssn} on {date}.",
];

const FINANCIAL: [&str; 25] = [
    "Applicant {name} opened an account with SSN {ssn} on {date}.",
    "The loan request from {name} discloses SSN {ssn}.",
    "Credit screening for {name} pulled SSN {ssn} on {date}.",
    "The mortgage file of {name} stores SSN {ssn}.",
    "Bank compliance flagged {name} under SSN {ssn} on {date}.",
    "A wire transfer by {name} verified SSN {ssn}.",
    "The brokerage profile for {name} holds SSN {ssn}.",
    "Card issuance for {name} confirmed SSN {ssn} on {date}.",
    "The lease guarantee from {name} quotes SSN {ssn}.",
    "Savings enrollment for {name} captured SSN {ssn} dated {date}.",
    "The credit union listed {name} beside SSN {ssn}.",
    "An overdraft review tied {name} to SSN {ssn}.",
    "The refinance packet for {name} includes SSN {ssn} on {date}.",
    "Collections contacted {name} about SSN {ssn}.",
    "The investment disclosure by {name} carries SSN {ssn}.",
    "Escrow paperwork for {name} prints SSN {ssn} on {date}.",
    "The dispute letter from {name} references SSN {ssn}.",
    "Identity checks cleared {name} against SSN {ssn} on {date}.",
    "The annuity contract for {name} retains SSN {ssn}.",
    "A cosigner form from {name} supplies SSN {ssn}.",
    "The teller entry for {name} recorded SSN {ssn} on {date}.",
    "Statement archives for {name} reveal SSN {ssn}.",
    "The default notice served {name} citing SSN {ssn}.",
    "Account recovery for {name} demanded SSN {ssn} on {date}.",
    "The wealth advisor profiled {name} with SSN {ssn}.",
];

const GOVERNMENT: [&str; 25] = [
    "Citizen {name} renewed benefits under SSN {ssn} on {date}.",
    "The passport desk verified {name} with SSN {ssn}.",
    "A license application from {name} bears SSN {ssn} dated {date}.",
    "The registry entry for {name} maps to SSN {ssn}.",
    "Census follow up reached {name} at SSN {ssn} on {date}.",
    "The veterans office indexed {name} by SSN {ssn}.",
    "A housing voucher for {name} cites SSN {ssn}.",
    "The court summons for {name} lists SSN {ssn} on {date}.",
    "Disability review matched {name} with SSN {ssn}.",
    "The permit office filed {name} under SSN {ssn} on {date}.",
    "Pension statements for {name} display SSN {ssn}.",
    "The jury notice addressed {name} regarding SSN {ssn}.",
    "A records request by {name} invoked SSN {ssn} on {date}.",
    "The motor vehicle bureau keyed {name} to SSN {ssn}.",
    "Security clearance for {name} examined SSN {ssn} dated {date}.",
    "The welfare caseworker logged {name} with SSN {ssn}.",
    "Municipal archives associate {name} with SSN {ssn}.",
    "The customs declaration by {name} noted SSN {ssn} on {date}.",
    "Voter rolls cross checked {name} against SSN {ssn}.",
    "The grant award to {name} referenced SSN {ssn} on {date}.",
    "Social services enrolled {name} using SSN {ssn}.",
    "The parole report for {name} retains SSN {ssn}.",
    "A subpoena concerning {name} exposed SSN {ssn} on {date}.",
    "The embassy notarized {name} presenting SSN {ssn}.",
    "Public assistance renewed {name} under SSN {ssn} dated {date}.",
];

const MEDICAL: [&str; 25] = [
    "Patient {name} registered with SSN {ssn} on {date}.",
    "The intake chart for {name} lists SSN {ssn}.",
    "Billing matched {name} to SSN {ssn} on {date}.",
    "The insurance claim for {name} carries SSN {ssn}.",
    "Admissions verified {name} holding SSN {ssn} dated {date}.",
    "The pharmacy profile of {name} shows SSN {ssn}.",
    "A referral letter for {name} cites SSN {ssn}.",
    "The lab requisition for {name} prints SSN {ssn} on {date}.",
    "Discharge papers for {name} repeat SSN {ssn}.",
    "The clinic portal enrolled {name} under SSN {ssn} on {date}.",
    "Consent forms signed by {name} include SSN {ssn}.",
    "The radiology order for {name} notes SSN {ssn} dated {date}.",
    "Emergency contacts for {name} attach to SSN {ssn}.",
    "The surgical schedule booked {name} with SSN {ssn} on {date}.",
    "Medical records custodians keyed {name} to SSN {ssn}.",
    "The copay ledger bills {name} through SSN {ssn}.",
    "A transfer summary for {name} states SSN {ssn} on {date}.",
    "The vaccination registry logged {name} beside SSN {ssn}.",
    "Therapy notes identify {name} by SSN {ssn}.",
    "The dental office confirmed {name} giving SSN {ssn} on {date}.",
    "Prior authorization for {name} quoted SSN {ssn}.",
    "The hospice admission of {name} recorded SSN {ssn} dated {date}.",
    "Telehealth onboarding for {name} requested SSN {ssn}.",
    "The dialysis roster pairs {name} with SSN {ssn} on {date}.",
    "Claims adjusters reviewed {name} under SSN {ssn}.",
];

/// Domain names in fixed order.
pub fn domains() -> &'static [&'static str] {
    &DOMAINS
}

/// The 25 templates of one domain.
pub fn templates_in_domain(domain: &str) -> &'static [&'static str] {
    match domain {
        "employment" => &EMPLOYMENT,
        "tax" => &TAX,
        "financial" => &FINANCIAL,
        "government" => &GOVERNMENT,
        "medical" => &MEDICAL,
        other => panic!("unknown template domain {other:?}"),
    }
}

/// All templates with their domain, in fixed order.
pub(crate) fn all_templates() -> Vec<(&'static str, &'static str)> {
    let mut out = Vec::with_capacity(TEMPLATE_COUNT);
    for domain in DOMAINS {
        for t in templates_in_domain(domain) {
            out.push((domain, *t));
        }
    }
    out
}
