namespace faq {}
